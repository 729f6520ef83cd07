//! Policy-guided proof search over rewrite sequences.

pub mod beam;
pub mod exhaustive;
pub mod heuristic;
pub mod policy;
pub mod replay;

use serde::{Deserialize, Serialize};

use crate::lang::{Limits, Program};
use crate::rewrite::RewriteRule;

pub use beam::{prove, SearchError};
pub use exhaustive::{exhaustive_prove, exhaustive_prove_with};
pub use heuristic::{distance, HeuristicPolicy};
pub use policy::{Policy, PolicyError, PolicyProposal};
pub use replay::ReplayPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Proposals requested per intermediate program.
    pub beam: usize,
    /// Intermediate programs kept per step.
    pub intermediates: usize,
    pub max_steps: usize,
    /// Discard intermediates that violate `limits`.
    pub enforce_limits: bool,
    pub limits: Limits,
    /// Record every legal expansion for later mining.
    pub trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            beam: 5,
            intermediates: 2,
            max_steps: 25,
            enforce_limits: true,
            limits: Limits::default(),
            trace: false,
        }
    }
}

impl SearchConfig {
    pub fn new(beam: usize, intermediates: usize) -> SearchConfig {
        SearchConfig { beam, intermediates, ..SearchConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "rules", rename_all = "snake_case")]
pub enum ProofStatus {
    Found(Vec<RewriteRule>),
    Exhausted,
    StepLimit,
}

/// One legal rewrite observed during a search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub before: Program,
    pub rule: RewriteRule,
    pub after: Program,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofResult {
    pub status: ProofStatus,
    pub states_expanded: usize,
    /// Set when an exhaustive search stopped at its state budget.
    #[serde(default)]
    pub budget_exceeded: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<TraceStep>,
}

impl ProofResult {
    pub fn proof(&self) -> Option<&[RewriteRule]> {
        match &self.status {
            ProofStatus::Found(seq) => Some(seq),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.proof().is_some()
    }

    pub fn proof_length(&self) -> Option<usize> {
        self.proof().map(<[RewriteRule]>::len)
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            ProofStatus::Found(_) => "found",
            ProofStatus::Exhausted => "exhausted",
            ProofStatus::StepLimit => "step_limit",
        }
    }
}
