use std::fmt;

use serde::{Deserialize, Serialize};

use super::program::Program;

/// Size limits a program must respect to be usable as model input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    pub max_statements: usize,
    /// Counted over right-hand-side expression nodes.
    pub max_nodes: usize,
    pub max_scalar_vars: usize,
    /// Expression depth with leaves at depth 1.
    pub max_depth: usize,
    pub max_outputs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_statements: 20, max_nodes: 100, max_scalar_vars: 30, max_depth: 6, max_outputs: 2 }
    }
}

impl Limits {
    /// Out-of-distribution profile: three outputs and up to 120 nodes.
    pub fn generalization() -> Limits {
        Limits { max_outputs: 3, max_nodes: 120, ..Limits::default() }
    }

    /// Only the hard vocabulary bounds (statement tokens and node addresses).
    pub fn unbounded() -> Limits {
        Limits {
            max_statements: 20,
            max_nodes: usize::MAX,
            max_scalar_vars: 30,
            max_depth: usize::MAX,
            max_outputs: usize::MAX,
        }
    }

    pub fn check(&self, p: &Program) -> Vec<LimitViolation> {
        let mut out = Vec::new();
        let mut push = |kind, actual: usize, limit: usize| {
            if actual > limit {
                out.push(LimitViolation { kind, actual, limit });
            }
        };
        push(LimitKind::Statements, p.len(), self.max_statements);
        push(LimitKind::Nodes, p.node_count(), self.max_nodes);
        push(LimitKind::ScalarVars, p.scalar_var_count(), self.max_scalar_vars);
        push(LimitKind::Depth, p.max_depth(), self.max_depth);
        push(LimitKind::Outputs, p.output_count(), self.max_outputs);
        out
    }

    pub fn admits(&self, p: &Program) -> bool {
        p.len() <= self.max_statements
            && p.node_count() <= self.max_nodes
            && p.max_depth() <= self.max_depth
            && p.output_count() <= self.max_outputs
            && p.scalar_var_count() <= self.max_scalar_vars
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitKind {
    Statements,
    Nodes,
    ScalarVars,
    Depth,
    Outputs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitViolation {
    pub kind: LimitKind,
    pub actual: usize,
    pub limit: usize,
}

impl fmt::Display for LimitViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            LimitKind::Statements => "statements",
            LimitKind::Nodes => "AST nodes",
            LimitKind::ScalarVars => "scalar variables",
            LimitKind::Depth => "expression depth",
            LimitKind::Outputs => "outputs",
        };
        write!(f, "{} {} exceeds limit {}", what, self.actual, self.limit)
    }
}

/// Checks `p` against the default limits.
pub fn check_limits(p: &Program) -> (bool, Vec<LimitViolation>) {
    let v = Limits::default().check(p);
    (v.is_empty(), v)
}
