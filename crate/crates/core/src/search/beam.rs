use std::collections::HashSet;

use crate::lang::{Limits, Program};
use crate::rewrite::{RewriteRule, Rewriter};
use crate::verify::{verify_with, VerifyStatus};

use super::policy::{Policy, PolicyError};
use super::{ProofResult, ProofStatus, SearchConfig, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("search configuration needs beam, intermediates and max_steps of at least 1")]
    BadConfig,
    #[error("found sequence failed re-verification: {0}")]
    Unverified(VerifyStatus),
}

struct Node {
    prog: Program,
    history: Vec<RewriteRule>,
}

/// Beam search: each kept intermediate is paired with the target and sent to
/// the policy; legal, unseen successors are goal-checked immediately, and up
/// to `intermediates` of them are kept by taking each pair's best usable
/// proposal first, then each pair's second, and so on.
pub fn prove(a: &Program, b: &Program, policy: &dyn Policy, cfg: &SearchConfig) -> Result<ProofResult, SearchError> {
    if cfg.beam == 0 || cfg.intermediates == 0 || cfg.max_steps == 0 {
        return Err(SearchError::BadConfig);
    }
    let rw = Rewriter::new(if cfg.enforce_limits { cfg.limits } else { Limits::unbounded() });
    let goal = b.to_prefix();
    let mut result =
        ProofResult { status: ProofStatus::StepLimit, states_expanded: 0, budget_exceeded: false, trace: Vec::new() };
    if a.to_prefix() == goal {
        result.status = ProofStatus::Found(Vec::new());
        return Ok(result);
    }
    let mut seen: HashSet<String> = HashSet::from([a.to_prefix()]);
    let mut frontier = vec![Node { prog: a.clone(), history: Vec::new() }];
    for _ in 0..cfg.max_steps {
        let queries: Vec<(&Program, &Program)> = frontier.iter().map(|n| (&n.prog, b)).collect();
        let proposals = policy.propose_batch(&queries, cfg.beam)?;
        result.states_expanded += frontier.len();
        let mut ranked: Vec<Vec<(RewriteRule, Program, String)>> = Vec::with_capacity(frontier.len());
        for (node, props) in frontier.iter().zip(&proposals) {
            let mut usable = Vec::new();
            for prop in props.iter().take(cfg.beam) {
                let Ok(next) = rw.apply(&prop.rule, &node.prog) else {
                    continue;
                };
                if cfg.trace {
                    result.trace.push(TraceStep { before: node.prog.clone(), rule: prop.rule, after: next.clone() });
                }
                let key = next.to_prefix();
                if key == goal {
                    let mut seq = node.history.clone();
                    seq.push(prop.rule);
                    let check = verify_with(&rw, a, b, &seq, false);
                    if !check.is_proven() {
                        return Err(SearchError::Unverified(check.status));
                    }
                    result.status = ProofStatus::Found(seq);
                    return Ok(result);
                }
                if !seen.contains(&key) {
                    usable.push((prop.rule, next, key));
                }
            }
            ranked.push(usable);
        }
        let mut next_frontier = Vec::new();
        let depth = ranked.iter().map(Vec::len).max().unwrap_or(0);
        'select: for rank in 0..depth {
            for (i, list) in ranked.iter_mut().enumerate() {
                if next_frontier.len() >= cfg.intermediates {
                    break 'select;
                }
                let Some((rule, prog, key)) = list.get_mut(rank) else {
                    continue;
                };
                if !seen.insert(std::mem::take(key)) {
                    continue;
                }
                let mut history = frontier[i].history.clone();
                history.push(*rule);
                next_frontier.push(Node { prog: prog.clone(), history });
            }
        }
        if next_frontier.is_empty() {
            result.status = ProofStatus::Exhausted;
            return Ok(result);
        }
        frontier = next_frontier;
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;
    use crate::lang::parse_prefix;
    use crate::search::PolicyProposal;

    /// Answers from a fixed table keyed by the current program's text.
    struct Scripted(HashMap<String, Vec<&'static str>>);

    impl Policy for Scripted {
        fn propose(&self, current: &Program, _: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
            let rules = self.0.get(&current.to_prefix()).cloned().unwrap_or_default();
            Ok(rules
                .into_iter()
                .take(beam)
                .enumerate()
                .map(|(i, r)| PolicyProposal { rule: r.parse().unwrap(), score: -(i as f64) })
                .collect())
        }
    }

    fn p(text: &str) -> Program {
        parse_prefix(text).unwrap()
    }

    #[test]
    fn identical_programs_need_no_steps() {
        let a = p("s01 === ( +s s02 s03 ) ;");
        let r = prove(&a, &a, &Scripted(HashMap::new()), &SearchConfig::new(3, 2)).unwrap();
        assert_eq!(r.status, ProofStatus::Found(vec![]));
        assert_eq!(r.states_expanded, 0);
    }

    #[test]
    fn second_ranked_proposal_of_second_pair_reaches_goal() {
        let a = p("s01 === ( +s s02 ( *s s03 s04 ) ) ;");
        let x1 = p("s01 === ( +s ( *s s03 s04 ) s02 ) ;");
        let x2 = p("s01 === ( +s ( +s 0s s02 ) ( *s s03 s04 ) ) ;");
        let y11 = p("s01 === ( +s ( *s s04 s03 ) s02 ) ;");
        let y21 = p("s01 === ( +s ( *s s03 s04 ) ( +s 0s s02 ) ) ;");
        let goal = p("s01 === ( +s ( *s s04 s03 ) ( +s 0s s02 ) ) ;");
        let table = HashMap::from([
            (a.to_prefix(), vec!["stm1 Commute N", "stm1 AddZero Nl", "stm1 Cancel N"]),
            (x1.to_prefix(), vec!["stm1 Commute Nl", "stm1 SubZero N"]),
            (x2.to_prefix(), vec!["stm1 Commute N", "stm1 NeutralOp Nl"]),
            (y11.to_prefix(), vec!["stm1 SubZero N", "stm1 DivOne Nl"]),
            (y21.to_prefix(), vec!["stm1 Commute Nll", "stm1 Commute Nl"]),
        ]);
        let cfg = SearchConfig { trace: true, ..SearchConfig::new(3, 2) };
        let r = prove(&a, &goal, &Scripted(table), &cfg).unwrap();
        let seq: Vec<String> = r.proof().unwrap().iter().map(|x| x.to_string()).collect();
        assert_eq!(seq, ["stm1 AddZero Nl", "stm1 Commute N", "stm1 Commute Nl"]);
        assert_eq!(r.states_expanded, 5);
        assert!(r.trace.iter().any(|t| t.after == goal));
        // the proposal leading back to the start program was never kept
        assert!(r.trace.iter().any(|t| t.after == a));
    }

    #[test]
    fn empty_frontier_is_exhausted() {
        let a = p("s01 === ( +s s02 s03 ) ;");
        let b = p("s01 === ( -s s02 s03 ) ;");
        let r = prove(&a, &b, &Scripted(HashMap::new()), &SearchConfig::new(2, 2)).unwrap();
        assert_eq!(r.status, ProofStatus::Exhausted);
        assert_eq!(r.states_expanded, 1);
    }
}
