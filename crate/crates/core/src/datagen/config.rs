use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::lang::Limits;
use crate::rewrite::RuleName;

/// Relative weights of the productions available for one result type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OpWeights {
    pub add: f64,
    pub sub: f64,
    /// `*s` for scalars, `*sv` for vectors.
    pub mul: f64,
    /// Scalars only.
    pub div: f64,
    pub neg: f64,
    /// Calls of the opaque functions with two operands of this result type.
    pub call_pair: f64,
    /// Calls with a vector operand (`g#s`, `g#v`).
    pub call_vector: f64,
}

impl Default for OpWeights {
    fn default() -> Self {
        OpWeights { add: 3.0, sub: 2.0, mul: 3.0, div: 1.5, neg: 0.8, call_pair: 0.5, call_vector: 0.4 }
    }
}

/// Per-pair multiplier on every rule probability, drawn from a Pareto law so
/// that most pairs see a few rewrites and a long tail sees many.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Intensity {
    pub scale: f64,
    pub shape: f64,
    pub cap: f64,
}

impl Default for Intensity {
    fn default() -> Self {
        Intensity { scale: 0.085, shape: 1.1, cap: 6.0 }
    }
}

impl Intensity {
    pub fn fixed(value: f64) -> Intensity {
        Intensity { scale: value, shape: f64::INFINITY, cap: value }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0);
        (self.scale * u.powf(-1.0 / self.shape)).min(self.cap)
    }
}

/// Parameters of the synthetic pair generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub limits: Limits,
    /// Weights for programs with 1, 2, 3, ... outputs.
    pub output_weights: Vec<f64>,
    pub vector_output_prob: f64,
    /// Weights for programs with 1, 2, 3, ... statements.
    pub statement_weights: Vec<f64>,
    /// Weights for a statement's maximum expression depth 1, 2, 3, ...
    pub depth_weights: Vec<f64>,
    /// Chance that an interior position below the root becomes a leaf early.
    pub early_leaf_prob: f64,
    pub const_leaf_prob: f64,
    /// Chance that a variable leaf reuses an existing input of its type.
    pub reuse_input_prob: f64,
    /// Chance that a new definition copies a subtree already used later on.
    pub duplicate_prob: f64,
    /// Chance that an interior node is drawn from the algebraic pattern set
    /// (shared factors, cancellations, neutral elements) instead of a plain
    /// operator.
    pub pattern_prob: f64,
    pub scalar_ops: OpWeights,
    pub vector_ops: OpWeights,
    /// Probability of applying a rule at one eligible location, before the
    /// per-pair intensity is applied.
    pub rule_probs: BTreeMap<RuleName, f64>,
    pub intensity: Intensity,
    pub passes: usize,
    pub max_retries: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            limits: Limits::default(),
            output_weights: vec![0.55, 0.45],
            vector_output_prob: 0.35,
            statement_weights: vec![
                1.0, 1.5, 2.0, 2.0, 2.0, 2.0, 1.8, 1.6, 1.4, 1.2, 1.0, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.25, 0.2, 0.15,
            ],
            depth_weights: vec![0.2, 1.0, 2.0, 2.5, 2.5, 2.0],
            early_leaf_prob: 0.2,
            const_leaf_prob: 0.03,
            reuse_input_prob: 0.3,
            duplicate_prob: 0.12,
            pattern_prob: 0.04,
            scalar_ops: OpWeights::default(),
            vector_ops: OpWeights { div: 0.0, ..OpWeights::default() },
            rule_probs: default_rule_probs(),
            intensity: Intensity::default(),
            passes: 3,
            max_retries: 50,
        }
    }
}

pub fn default_rule_probs() -> BTreeMap<RuleName, f64> {
    use RuleName::*;
    [
        (SwapPrev, 0.04),
        (UseVar, 0.5),
        (DeleteStm, 0.6),
        (Inline, 0.04),
        (NewTmp, 0.002),
        (Rename, 0.02),
        (AddZero, 0.004),
        (SubZero, 0.004),
        (MultOne, 0.004),
        (DivOne, 0.004),
        (Cancel, 0.5),
        (NeutralOp, 0.5),
        (DoubleOp, 0.5),
        (AbsorbOp, 0.5),
        (Commute, 0.09),
        (DistributeLeft, 0.06),
        (DistributeRight, 0.06),
        (FactorLeft, 0.65),
        (FactorRight, 0.65),
        (AssociativeLeft, 0.06),
        (AssociativeRight, 0.06),
        (FlipLeft, 0.3),
        (FlipRight, 0.1),
    ]
    .into_iter()
    .collect()
}

impl GenConfig {
    /// Programs with three outputs and 101 to 120 nodes, outside the default
    /// training limits.
    pub fn generalization() -> GenConfig {
        GenConfig {
            limits: Limits::generalization(),
            output_weights: vec![0.0, 0.0, 1.0],
            statement_weights: vec![
                0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0,
            ],
            depth_weights: vec![0.0, 0.0, 0.5, 1.0, 2.0, 3.0],
            early_leaf_prob: 0.05,
            ..GenConfig::default()
        }
    }

    pub fn rule_prob(&self, rule: RuleName) -> f64 {
        self.rule_probs.get(&rule).copied().unwrap_or(0.0)
    }

    pub fn with_rule_probs(mut self, f: impl Fn(RuleName) -> f64) -> GenConfig {
        self.rule_probs = RuleName::ALL.into_iter().map(|r| (r, f(r))).collect();
        self
    }

    pub fn any_rule_enabled(&self) -> bool {
        self.rule_probs.values().any(|p| *p > 0.0)
    }
}
