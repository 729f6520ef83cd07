//! Known-equivalent program pairs: synthetic generation from a probabilistic
//! grammar and compiler-style pass chains over normalized source programs.

pub mod compile;
pub mod config;
pub mod progen;
pub mod rules;
pub mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lang::eval::splitmix;
use crate::lang::Program;
use crate::rewrite::RewriteRule;

pub use compile::{compile_corpus, compile_pairs, compile_pairs_with, find_source_programs, SourceError};
pub use config::{GenConfig, Intensity, OpWeights};
pub use progen::generate_prog_a;
pub use rules::{apply_random_rules, generate_pair, rules_with};
pub use stats::CorpusStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    Synthetic,
    Compiled,
    Mined,
}

/// A pair of equivalent programs, with the rewrite sequence that produced the
/// second from the first when it is known.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub prog_a: Program,
    pub prog_b: Program,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gen_seq: Option<Vec<RewriteRule>>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("no admissible program within the retry budget")]
    RetriesExhausted,
}

/// Seed of the `index`-th item generated from `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix(master ^ splitmix(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// `n` synthetic pairs, generated in parallel; identical for a given config.
pub fn generate_pairs(cfg: &GenConfig, n: usize) -> Result<Vec<Sample>, GenError> {
    (0..n as u64).into_par_iter().map(|i| generate_pair(cfg, derive_seed(cfg.seed, i))).collect()
}
