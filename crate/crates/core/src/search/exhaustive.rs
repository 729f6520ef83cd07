use std::cmp::Ordering;
use std::collections::HashMap;

use crate::lang::Program;
use crate::rewrite::{candidates, RewriteRule, Rewriter, RuleName};

use super::{ProofResult, ProofStatus};

/// Default cap on distinct programs visited by [`exhaustive_prove`].
pub const DEFAULT_STATE_BUDGET: usize = 200_000;

/// Breadth-first search over every legal rewrite. Finds a shortest proof of
/// length at most `max_depth` whenever one exists within the state budget.
pub fn exhaustive_prove(a: &Program, b: &Program, max_depth: usize) -> ProofResult {
    exhaustive_prove_with(&Rewriter::default(), a, b, max_depth, DEFAULT_STATE_BUDGET)
}

pub fn exhaustive_prove_with(rw: &Rewriter, a: &Program, b: &Program, max_depth: usize, budget: usize) -> ProofResult {
    let goal = b.to_prefix();
    let start = a.to_prefix();
    let mut result =
        ProofResult { status: ProofStatus::Exhausted, states_expanded: 0, budget_exceeded: false, trace: Vec::new() };
    if start == goal {
        result.status = ProofStatus::Found(Vec::new());
        return result;
    }
    // program text -> (parent text, rule leading here)
    let mut parents: Parents = HashMap::from([(start.clone(), None)]);
    let mut level = vec![(start, a.clone())];
    for depth in 0..max_depth {
        let mut next_level = Vec::new();
        for (key, prog) in &level {
            result.states_expanded += 1;
            if depth + 1 == max_depth {
                if let Some(rule) = finishing_rule(rw, prog, b, &goal) {
                    let mut seq = path_to(&parents, key);
                    seq.push(rule);
                    result.status = ProofStatus::Found(seq);
                    return result;
                }
                continue;
            }
            for (rule, next) in rw.successors(prog) {
                let nk = next.to_prefix();
                if parents.contains_key(&nk) {
                    continue;
                }
                parents.insert(nk.clone(), Some((key.clone(), rule)));
                if nk == goal {
                    result.status = ProofStatus::Found(path_to(&parents, &nk));
                    return result;
                }
                if parents.len() >= budget {
                    result.budget_exceeded = true;
                    return result;
                }
                next_level.push((nk, next));
            }
        }
        if next_level.is_empty() {
            break;
        }
        level = next_level;
    }
    result
}

type Parents = HashMap<String, Option<(String, RewriteRule)>>;

fn path_to(parents: &Parents, key: &str) -> Vec<RewriteRule> {
    let mut seq = Vec::new();
    let mut at = key.to_string();
    while let Some(Some((parent, r))) = parents.get(&at) {
        seq.push(*r);
        at = parent.clone();
    }
    seq.reverse();
    seq
}

/// Whether `rule` could turn `p` into `g` in one step, judged only by which
/// statements each rule can touch. Node rules, `UseVar` and `Inline` edit
/// statement `stm`; `Rename` edits `stm` and later ones; `SwapPrev` also
/// edits the statement before; `NewTmp` and `DeleteStm` change the length.
fn may_finish(p: &Program, g: &Program, rule: &RewriteRule) -> bool {
    match p.len().cmp(&g.len()) {
        Ordering::Greater => p.len() == g.len() + 1 && rule.name == RuleName::DeleteStm,
        Ordering::Less => p.len() + 1 == g.len() && rule.name == RuleName::NewTmp,
        Ordering::Equal => {
            let Some(f) = p.stmts().iter().zip(g.stmts()).position(|(x, y)| x != y) else {
                return false;
            };
            match rule.name {
                RuleName::NewTmp | RuleName::DeleteStm => false,
                RuleName::SwapPrev => rule.stm == f + 2,
                _ => rule.stm == f + 1,
            }
        }
    }
}

/// A legal rule taking `p` to the goal, trying only rules that could.
fn finishing_rule(rw: &Rewriter, p: &Program, g: &Program, goal: &str) -> Option<RewriteRule> {
    candidates(p)
        .into_iter()
        .filter(|r| may_finish(p, g, r))
        .find(|r| rw.apply(r, p).is_ok_and(|q| q.to_prefix() == goal))
}
