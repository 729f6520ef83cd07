use std::collections::HashMap;

use crate::lang::Program;
use crate::rewrite::Rewriter;

use super::policy::{Policy, PolicyError, PolicyProposal};

fn token_counts(text: &str) -> HashMap<&str, i64> {
    let mut m = HashMap::new();
    for t in text.split_whitespace() {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

fn multiset_gap(a: &HashMap<&str, i64>, b: &HashMap<&str, i64>) -> i64 {
    let mut d = 0;
    for (t, n) in a {
        d += (n - b.get(t).copied().unwrap_or(0)).abs();
    }
    for (t, n) in b {
        if !a.contains_key(t) {
            d += n;
        }
    }
    d
}

/// Size of the symmetric difference of the two token multisets, plus the
/// difference in statement counts. Zero does not imply identity.
pub fn distance(p: &Program, q: &Program) -> f64 {
    let (a, b) = (p.to_prefix(), q.to_prefix());
    let gap = multiset_gap(&token_counts(&a), &token_counts(&b));
    (gap + (p.len() as i64 - q.len() as i64).abs()) as f64
}

/// Baseline policy: ranks every legal rewrite by how close its result is to
/// the target. A successor equal to the target outranks everything.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicPolicy {
    pub rewriter: Rewriter,
}

impl HeuristicPolicy {
    pub fn new(rewriter: Rewriter) -> HeuristicPolicy {
        HeuristicPolicy { rewriter }
    }
}

impl Policy for HeuristicPolicy {
    fn propose(&self, current: &Program, target: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
        let goal = target.to_prefix();
        let goal_counts = token_counts(&goal);
        let mut scored: Vec<(f64, String, PolicyProposal)> = self
            .rewriter
            .successors(current)
            .into_iter()
            .map(|(rule, next)| {
                let text = next.to_prefix();
                let score = if text == goal {
                    1.0
                } else {
                    let gap = multiset_gap(&token_counts(&text), &goal_counts);
                    -((gap + (next.len() as i64 - target.len() as i64).abs()) as f64)
                };
                (score, rule.to_string(), PolicyProposal { rule, score })
            })
            .collect();
        scored.sort_by(|x, y| y.0.total_cmp(&x.0).then_with(|| x.1.cmp(&y.1)));
        Ok(scored.into_iter().take(beam).map(|(_, _, p)| p).collect())
    }
}
