use serde::{Deserialize, Serialize};

use crate::lang::Program;
use crate::rewrite::RewriteRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyProposal {
    pub rule: RewriteRule,
    /// Higher is better; log-probability-like.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("policy transport failed: {0}")]
    Transport(String),
    #[error("policy did not answer within {0:?}")]
    Timeout(std::time::Duration),
    #[error("policy protocol error: {0}")]
    Protocol(String),
}

/// Proposes ranked rewrite rules for moving `current` towards `target`.
pub trait Policy: Send + Sync {
    /// At most `beam` proposals, best first.
    fn propose(&self, current: &Program, target: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError>;

    /// One proposal list per query. Policies with per-request latency can
    /// override this to overlap requests.
    fn propose_batch(
        &self,
        queries: &[(&Program, &Program)],
        beam: usize,
    ) -> Result<Vec<Vec<PolicyProposal>>, PolicyError> {
        queries.iter().map(|(c, t)| self.propose(c, t, beam)).collect()
    }
}

impl<P: Policy + ?Sized> Policy for &P {
    fn propose(&self, current: &Program, target: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
        (**self).propose(current, target, beam)
    }

    fn propose_batch(
        &self,
        queries: &[(&Program, &Program)],
        beam: usize,
    ) -> Result<Vec<Vec<PolicyProposal>>, PolicyError> {
        (**self).propose_batch(queries, beam)
    }
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn propose(&self, current: &Program, target: &Program, beam: usize) -> Result<Vec<PolicyProposal>, PolicyError> {
        (**self).propose(current, target, beam)
    }

    fn propose_batch(
        &self,
        queries: &[(&Program, &Program)],
        beam: usize,
    ) -> Result<Vec<Vec<PolicyProposal>>, PolicyError> {
        (**self).propose_batch(queries, beam)
    }
}
