use std::collections::HashMap;

use crate::lang::Program;
use crate::rewrite::{RewriteRule, Rewriter};

use super::policy::{Policy, PolicyError, PolicyProposal};

/// Replays known rewrite sequences: proposes the rule that followed the
/// current program on the way to the target. When a sequence revisits a
/// program, the later continuation wins.
#[derive(Debug, Clone, Default)]
pub struct ReplayPolicy {
    table: HashMap<(String, String), RewriteRule>,
}

impl ReplayPolicy {
    pub fn new() -> ReplayPolicy {
        ReplayPolicy::default()
    }

    /// Records the path of `seq` from `a` towards `b`. Steps after the first
    /// illegal one are ignored.
    pub fn add(&mut self, rw: &Rewriter, a: &Program, b: &Program, seq: &[RewriteRule]) {
        let goal = b.to_prefix();
        let mut cur = a.clone();
        for rule in seq {
            self.table.insert((cur.to_prefix(), goal.clone()), *rule);
            match rw.apply(rule, &cur) {
                Ok(next) => cur = next,
                Err(_) => break,
            }
        }
    }

    pub fn from_sequence(a: &Program, b: &Program, seq: &[RewriteRule]) -> ReplayPolicy {
        let mut p = ReplayPolicy::new();
        p.add(&Rewriter::default(), a, b, seq);
        p
    }
}

impl Policy for ReplayPolicy {
    fn propose(&self, current: &Program, target: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
        let key = (current.to_prefix(), target.to_prefix());
        Ok(self
            .table
            .get(&key)
            .filter(|_| beam > 0)
            .map(|rule| PolicyProposal { rule: *rule, score: 0.0 })
            .into_iter()
            .collect())
    }
}
