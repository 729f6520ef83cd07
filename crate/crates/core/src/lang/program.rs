use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::{Expr, TypeError};
use super::token::{TypeTag, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Stmt {
    pub target: VarId,
    /// Printed as `===` instead of `=`.
    pub is_output: bool,
    pub rhs: Expr,
}

impl Stmt {
    pub fn assign(target: VarId, rhs: Expr) -> Stmt {
        Stmt { target, is_output: false, rhs }
    }

    pub fn output(target: VarId, rhs: Expr) -> Stmt {
        Stmt { target, is_output: true, rhs }
    }

    pub fn write_prefix(&self, out: &mut String) {
        out.push_str(&self.target.to_string());
        out.push_str(if self.is_output { " === " } else { " = " });
        self.rhs.write_prefix(out);
        out.push_str(" ;");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    Input,
    Temp,
    Output,
}

pub type RoleMap = BTreeMap<VarId, Role>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("program has no statements")]
    Empty,
    #[error("stm{stmt}: {source}")]
    Type {
        stmt: usize,
        #[source]
        source: TypeError,
    },
    #[error("stm{stmt}: cannot assign {found} expression to {target}")]
    TargetType { stmt: usize, target: VarId, found: TypeTag },
    #[error("stm{stmt}: {var} is read before being assigned, so it is an input and cannot be assigned")]
    InputAssigned { stmt: usize, var: VarId },
    #[error("stm{stmt}: output {var} is used after its final assignment")]
    OutputUsedAfter { stmt: usize, var: VarId },
}

/// An ordered list of typed assignments. Construction validates typing and the
/// role discipline (inputs never assigned, outputs never touched after their
/// `===` assignment); size limits are checked separately.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    stmts: Vec<Stmt>,
}

impl Program {
    pub fn new(stmts: Vec<Stmt>) -> Result<Program, ProgramError> {
        let p = Program { stmts };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<(), ProgramError> {
        if self.stmts.is_empty() {
            return Err(ProgramError::Empty);
        }
        let mut assigned: BTreeSet<VarId> = BTreeSet::new();
        let mut inputs: BTreeSet<VarId> = BTreeSet::new();
        let mut finished: BTreeSet<VarId> = BTreeSet::new();
        for (i, s) in self.stmts.iter().enumerate() {
            let n = i + 1;
            let ty = s.rhs.check().map_err(|source| ProgramError::Type { stmt: n, source })?;
            if ty != s.target.ty() {
                return Err(ProgramError::TargetType { stmt: n, target: s.target, found: ty });
            }
            for v in s.rhs.vars() {
                if finished.contains(&v) {
                    return Err(ProgramError::OutputUsedAfter { stmt: n, var: v });
                }
                if !assigned.contains(&v) {
                    inputs.insert(v);
                }
            }
            if inputs.contains(&s.target) {
                return Err(ProgramError::InputAssigned { stmt: n, var: s.target });
            }
            if finished.contains(&s.target) {
                return Err(ProgramError::OutputUsedAfter { stmt: n, var: s.target });
            }
            assigned.insert(s.target);
            if s.is_output {
                finished.insert(s.target);
            }
        }
        Ok(())
    }

    pub fn stmts(&self) -> &[Stmt] {
        &self.stmts
    }

    pub fn into_stmts(self) -> Vec<Stmt> {
        self.stmts
    }

    pub fn len(&self) -> usize {
        self.stmts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stmts.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.stmts.iter().map(|s| s.rhs.node_count()).sum()
    }

    pub fn max_depth(&self) -> usize {
        self.stmts.iter().map(|s| s.rhs.depth()).max().unwrap_or(0)
    }

    pub fn output_count(&self) -> usize {
        self.stmts.iter().filter(|s| s.is_output).count()
    }

    pub fn call_count(&self) -> usize {
        self.stmts.iter().map(|s| s.rhs.count_calls()).sum()
    }

    /// Output variables in statement order.
    pub fn outputs(&self) -> Vec<VarId> {
        self.stmts.iter().filter(|s| s.is_output).map(|s| s.target).collect()
    }

    /// Variables read before any assignment.
    pub fn inputs(&self) -> BTreeSet<VarId> {
        let mut assigned = BTreeSet::new();
        let mut inputs = BTreeSet::new();
        for s in &self.stmts {
            for v in s.rhs.vars() {
                if !assigned.contains(&v) {
                    inputs.insert(v);
                }
            }
            assigned.insert(s.target);
        }
        inputs
    }

    pub fn roles(&self) -> RoleMap {
        let mut roles: RoleMap = self.inputs().into_iter().map(|v| (v, Role::Input)).collect();
        for s in &self.stmts {
            let role = if s.is_output { Role::Output } else { Role::Temp };
            let entry = roles.entry(s.target).or_insert(role);
            if role == Role::Output {
                *entry = Role::Output;
            }
        }
        roles
    }

    /// Every variable mentioned anywhere, as target or operand.
    pub fn vars(&self) -> BTreeSet<VarId> {
        let mut out = BTreeSet::new();
        for s in &self.stmts {
            out.insert(s.target);
            s.rhs.collect_vars(&mut out);
        }
        out
    }

    pub fn scalar_var_count(&self) -> usize {
        self.vars().iter().filter(|v| v.ty() == TypeTag::Scalar).count()
    }

    /// Index of the last assignment to `v` strictly before statement index `k`.
    pub fn last_def_before(&self, k: usize, v: VarId) -> Option<usize> {
        self.stmts[..k].iter().rposition(|s| s.target == v)
    }

    /// Index of the first assignment to `v` strictly after statement index `k`.
    pub fn next_def_after(&self, k: usize, v: VarId) -> Option<usize> {
        self.stmts.iter().enumerate().skip(k + 1).find(|(_, s)| s.target == v).map(|(i, _)| i)
    }

    pub fn to_prefix(&self) -> String {
        let mut out = String::with_capacity(self.node_count() * 5 + self.len() * 10);
        for (i, s) in self.stmts.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            s.write_prefix(&mut out);
        }
        out
    }

    pub fn tokens(&self) -> Vec<String> {
        self.to_prefix().split(' ').map(str::to_owned).collect()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_prefix())
    }
}

/// Programs serialize as their prefix text and deserialize under the loosest
/// limits the token vocabulary can express.
impl Serialize for Program {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_prefix())
    }
}

impl<'de> Deserialize<'de> for Program {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        super::prefix::parse_prefix_with(&text, &super::limits::Limits::unbounded()).map_err(serde::de::Error::custom)
    }
}
