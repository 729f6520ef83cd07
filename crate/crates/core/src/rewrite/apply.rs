use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lang::{Expr, Limits, NodePath, Program, ProgramError, Stmt, VarId};

use super::axioms::rewrite_node;
use super::rule::{RewriteRule, RuleName};

/// Why a rule could not be applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, thiserror::Error)]
pub enum ApplyError {
    #[error("the rule's pattern does not match here")]
    IllegalPattern,
    #[error("operand types do not match")]
    TypeMismatch,
    #[error("the rewrite would change a data dependence")]
    DependenceViolation,
    #[error("the result exceeds the program limits")]
    LimitExceeded,
    #[error("no such statement or node")]
    BadAddress,
    #[error("the variable is already in use")]
    VarConflict,
}

impl From<ProgramError> for ApplyError {
    fn from(e: ProgramError) -> ApplyError {
        match e {
            ProgramError::Empty => ApplyError::IllegalPattern,
            ProgramError::Type { .. } | ProgramError::TargetType { .. } => ApplyError::TypeMismatch,
            ProgramError::InputAssigned { .. } | ProgramError::OutputUsedAfter { .. } => {
                ApplyError::DependenceViolation
            }
        }
    }
}

/// Applies and enumerates rewrite rules under a fixed set of program limits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Rewriter {
    pub limits: Limits,
}

impl Rewriter {
    pub fn new(limits: Limits) -> Rewriter {
        Rewriter { limits }
    }

    pub fn apply(&self, rule: &RewriteRule, p: &Program) -> Result<Program, ApplyError> {
        if rule.name.takes_node() != rule.path.is_some() || rule.name.takes_var() != rule.var.is_some() {
            return Err(ApplyError::IllegalPattern);
        }
        let k = rule.stm.checked_sub(1).ok_or(ApplyError::BadAddress)?;
        if k >= p.len() {
            return Err(ApplyError::BadAddress);
        }
        let stmts = match (rule.name, rule.path, rule.var) {
            (RuleName::SwapPrev, _, _) => swap_prev(p, k)?,
            (RuleName::UseVar, _, Some(v)) => use_var(p, k, v)?,
            (RuleName::DeleteStm, _, _) => delete_stm(p, k)?,
            (RuleName::Inline, _, Some(v)) => inline(p, k, v)?,
            (RuleName::NewTmp, Some(path), Some(v)) => new_tmp(p, k, path, v)?,
            (RuleName::Rename, _, Some(v)) => rename(p, k, v)?,
            (name, Some(path), None) => node_rule(p, k, name, path)?,
            _ => return Err(ApplyError::IllegalPattern),
        };
        self.finish(stmts)
    }

    fn finish(&self, stmts: Vec<Stmt>) -> Result<Program, ApplyError> {
        let prog = Program::new(stmts)?;
        if self.limits.admits(&prog) {
            Ok(prog)
        } else {
            Err(ApplyError::LimitExceeded)
        }
    }

    /// Every rule that applies to `p`, ordered by statement, rule name, node
    /// path and variable.
    pub fn enumerate_legal(&self, p: &Program) -> Vec<RewriteRule> {
        self.successors(p).into_iter().map(|(r, _)| r).collect()
    }

    /// Legal rules paired with the programs they produce, in the same order as
    /// [`Rewriter::enumerate_legal`].
    pub fn successors(&self, p: &Program) -> Vec<(RewriteRule, Program)> {
        let mut out = Vec::new();
        for rule in candidates(p) {
            if let Ok(q) = self.apply(&rule, p) {
                out.push((rule, q));
            }
        }
        out
    }
}

/// A superset of the legal rules of `p`, in enumeration order.
pub fn candidates(p: &Program) -> Vec<RewriteRule> {
    let vars = p.vars();
    let inputs = p.inputs();
    let mut out = Vec::new();
    for (k, s) in p.stmts().iter().enumerate() {
        let stm = k + 1;
        let defined_before: BTreeSet<VarId> = p.stmts()[..k].iter().map(|s| s.target).collect();
        let paths = s.rhs.paths();
        for name in RuleName::ALL {
            match name {
                RuleName::SwapPrev => {
                    if k > 0 {
                        out.push(RewriteRule::stmt(stm, name));
                    }
                }
                RuleName::DeleteStm => {
                    if !s.is_output {
                        out.push(RewriteRule::stmt(stm, name));
                    }
                }
                RuleName::UseVar => {
                    out.extend(defined_before.iter().map(|&v| RewriteRule::with_var(stm, name, v)));
                }
                RuleName::Inline => {
                    out.extend(
                        s.rhs
                            .vars()
                            .into_iter()
                            .filter(|v| defined_before.contains(v))
                            .map(|v| RewriteRule::with_var(stm, name, v)),
                    );
                }
                RuleName::NewTmp => {
                    for &path in &paths {
                        let ty = s.rhs.at(path).expect("enumerated path").ty();
                        out.extend(
                            VarId::all_of(ty).filter(|v| !vars.contains(v)).map(|v| RewriteRule::new_tmp(stm, path, v)),
                        );
                    }
                }
                RuleName::Rename => {
                    if !s.is_output {
                        out.extend(
                            VarId::all_of(s.target.ty())
                                .filter(|v| *v != s.target && !inputs.contains(v))
                                .map(|v| RewriteRule::with_var(stm, name, v)),
                        );
                    }
                }
                _ => {
                    for &path in &paths {
                        let node = s.rhs.at(path).expect("enumerated path");
                        if rewrite_node(name, node).is_some() {
                            out.push(RewriteRule::node(stm, name, path));
                        }
                    }
                }
            }
        }
    }
    out
}

fn node_rule(p: &Program, k: usize, name: RuleName, path: NodePath) -> Result<Vec<Stmt>, ApplyError> {
    let node = p.stmts()[k].rhs.at(path).ok_or(ApplyError::BadAddress)?;
    let replacement = rewrite_node(name, node).ok_or(ApplyError::IllegalPattern)?;
    let mut stmts = p.stmts().to_vec();
    *stmts[k].rhs.at_mut(path).expect("address checked above") = replacement;
    Ok(stmts)
}

fn swap_prev(p: &Program, k: usize) -> Result<Vec<Stmt>, ApplyError> {
    if k == 0 {
        return Err(ApplyError::IllegalPattern);
    }
    let (a, b) = (&p.stmts()[k - 1], &p.stmts()[k]);
    if a.target == b.target || b.rhs.reads(a.target) || a.rhs.reads(b.target) {
        return Err(ApplyError::DependenceViolation);
    }
    let mut stmts = p.stmts().to_vec();
    stmts.swap(k - 1, k);
    Ok(stmts)
}

/// The most recent definition of `v` before statement `k`, provided it still
/// holds at `k`.
fn live_definition(p: &Program, k: usize, v: VarId) -> Result<&Expr, ApplyError> {
    let j = p.last_def_before(k, v).ok_or(ApplyError::IllegalPattern)?;
    let def = &p.stmts()[j].rhs;
    if def.reads(v) {
        return Err(ApplyError::DependenceViolation);
    }
    let def_vars = def.vars();
    if p.stmts()[j + 1..k].iter().any(|s| def_vars.contains(&s.target)) {
        return Err(ApplyError::DependenceViolation);
    }
    Ok(def)
}

fn use_var(p: &Program, k: usize, v: VarId) -> Result<Vec<Stmt>, ApplyError> {
    let def = live_definition(p, k, v)?;
    let mut stmts = p.stmts().to_vec();
    if stmts[k].rhs.replace_subtree(def, &Expr::Var(v)) == 0 {
        return Err(ApplyError::IllegalPattern);
    }
    Ok(stmts)
}

fn inline(p: &Program, k: usize, v: VarId) -> Result<Vec<Stmt>, ApplyError> {
    if !p.stmts()[k].rhs.reads(v) {
        return Err(ApplyError::IllegalPattern);
    }
    let def = live_definition(p, k, v)?;
    let mut stmts = p.stmts().to_vec();
    stmts[k].rhs.substitute_var(v, def);
    Ok(stmts)
}

fn delete_stm(p: &Program, k: usize) -> Result<Vec<Stmt>, ApplyError> {
    let s = &p.stmts()[k];
    if s.is_output || p.len() == 1 {
        return Err(ApplyError::IllegalPattern);
    }
    let end = p.next_def_after(k, s.target).unwrap_or(p.len() - 1);
    if p.stmts()[k + 1..=end].iter().any(|t| t.rhs.reads(s.target)) {
        return Err(ApplyError::DependenceViolation);
    }
    let mut stmts = p.stmts().to_vec();
    stmts.remove(k);
    Ok(stmts)
}

fn new_tmp(p: &Program, k: usize, path: NodePath, v: VarId) -> Result<Vec<Stmt>, ApplyError> {
    let node = p.stmts()[k].rhs.at(path).ok_or(ApplyError::BadAddress)?;
    if node.ty() != v.ty() {
        return Err(ApplyError::TypeMismatch);
    }
    if p.vars().contains(&v) {
        return Err(ApplyError::VarConflict);
    }
    let def = Stmt::assign(v, node.clone());
    let mut stmts = p.stmts().to_vec();
    *stmts[k].rhs.at_mut(path).expect("address checked above") = Expr::Var(v);
    stmts.insert(k, def);
    Ok(stmts)
}

fn rename(p: &Program, k: usize, v: VarId) -> Result<Vec<Stmt>, ApplyError> {
    let s = &p.stmts()[k];
    let old = s.target;
    if s.is_output || v == old {
        return Err(ApplyError::IllegalPattern);
    }
    if v.ty() != old.ty() {
        return Err(ApplyError::TypeMismatch);
    }
    if p.inputs().contains(&v) || p.stmts()[..k].iter().any(|t| t.is_output && t.target == v) {
        return Err(ApplyError::VarConflict);
    }
    let next_old = p.next_def_after(k, old);
    let end = next_old.unwrap_or(p.len() - 1);
    // v must keep no other value while it stands in for the old target
    if p.stmts()[k + 1..=end].iter().any(|t| t.target == v) {
        return Err(ApplyError::VarConflict);
    }
    // and its previous value must be dead from here on
    let v_end = p.next_def_after(k, v).unwrap_or(p.len() - 1);
    if p.stmts()[k + 1..=v_end].iter().any(|t| t.rhs.reads(v)) {
        return Err(ApplyError::VarConflict);
    }
    let mut stmts = p.stmts().to_vec();
    stmts[k].target = v;
    let with = Expr::Var(v);
    for t in &mut stmts[k + 1..=end] {
        t.rhs.substitute_var(old, &with);
    }
    Ok(stmts)
}

/// Applies `rule` under the default limits.
pub fn apply(rule: &RewriteRule, p: &Program) -> Result<Program, ApplyError> {
    Rewriter::default().apply(rule, p)
}

/// Enumerates the legal rules of `p` under the default limits.
pub fn enumerate_legal(p: &Program) -> Vec<RewriteRule> {
    Rewriter::default().enumerate_legal(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_prefix;

    fn prog(text: &str) -> Program {
        parse_prefix(text).unwrap()
    }

    fn run(rule: &str, text: &str) -> Result<String, ApplyError> {
        apply(&rule.parse().unwrap(), &prog(text)).map(|p| p.to_prefix())
    }

    #[test]
    fn mult_one_on_right_child() {
        let out = run("stm1 MultOne Nr", "s25 === ( /s s26 ( -s s27 s28 ) ) ;").unwrap();
        assert_eq!(out, "s25 === ( /s s26 ( *s 1s ( -s s27 s28 ) ) ) ;");
    }

    #[test]
    fn cancel_and_commute() {
        assert_eq!(run("stm1 Cancel N", "v02 === ( -v v01 v01 ) ;").unwrap(), "v02 === 0v ;");
        assert_eq!(run("stm1 Commute N", "s01 === ( +s s02 s03 ) ;").unwrap(), "s01 === ( +s s03 s02 ) ;");
    }

    #[test]
    fn address_errors() {
        assert_eq!(run("stm2 Commute N", "s01 === ( +s s02 s03 ) ;"), Err(ApplyError::BadAddress));
        assert_eq!(run("stm1 Commute Nll", "s01 === ( +s s02 s03 ) ;"), Err(ApplyError::BadAddress));
        assert_eq!(run("stm1 Commute Nl", "s01 === ( +s s02 s03 ) ;"), Err(ApplyError::IllegalPattern));
    }

    #[test]
    fn delete_stm_legality() {
        assert_eq!(run("stm1 DeleteStm", "s01 === s02 ;"), Err(ApplyError::IllegalPattern));
        let p = "s05 = ( +s s01 s02 ) ; s03 === ( *s s01 s02 ) ;";
        assert_eq!(run("stm1 DeleteStm", p).unwrap(), "s03 === ( *s s01 s02 ) ;");
        assert_eq!(run("stm2 DeleteStm", p), Err(ApplyError::IllegalPattern));
        let read = "s05 = ( +s s01 s02 ) ; s03 === ( *s s05 s02 ) ;";
        assert_eq!(run("stm1 DeleteStm", read), Err(ApplyError::DependenceViolation));
        let overwritten = "s05 = s01 ; s05 = ( *s s05 s02 ) ; s03 === s05 ;";
        assert_eq!(run("stm1 DeleteStm", overwritten), Err(ApplyError::DependenceViolation));
        let dead = "s05 = s01 ; s05 = s02 ; s03 === s05 ;";
        assert_eq!(run("stm1 DeleteStm", dead).unwrap(), "s05 = s02 ; s03 === s05 ;");
    }

    #[test]
    fn swap_prev() {
        let p = "s05 = ( +s s01 s02 ) ; s06 = ( -s s01 s02 ) ; s03 === ( *s s05 s06 ) ;";
        assert_eq!(
            run("stm2 SwapPrev", p).unwrap(),
            "s06 = ( -s s01 s02 ) ; s05 = ( +s s01 s02 ) ; s03 === ( *s s05 s06 ) ;"
        );
        assert_eq!(run("stm3 SwapPrev", p), Err(ApplyError::DependenceViolation));
        assert_eq!(run("stm1 SwapPrev", p), Err(ApplyError::IllegalPattern));
    }

    #[test]
    fn use_var_and_inline() {
        let p = "s05 = ( +s s01 s02 ) ; s03 === ( *s ( +s s01 s02 ) ( +s s01 s02 ) ) ;";
        let used = run("stm2 UseVar s05", p).unwrap();
        assert_eq!(used, "s05 = ( +s s01 s02 ) ; s03 === ( *s s05 s05 ) ;");
        assert_eq!(run("stm2 Inline s05", &used).unwrap(), p);
        assert_eq!(run("stm2 UseVar s06", p), Err(ApplyError::IllegalPattern));
        let clobbered = "s06 = s04 ; s05 = ( +s s06 s02 ) ; s06 = s01 ; s03 === ( *s s05 s06 ) ;";
        assert_eq!(run("stm4 Inline s05", clobbered), Err(ApplyError::DependenceViolation));
        let self_ref = "s05 = s01 ; s05 = ( +s s05 s02 ) ; s03 === ( *s s05 s05 ) ;";
        assert_eq!(run("stm3 Inline s05", self_ref), Err(ApplyError::DependenceViolation));
    }

    #[test]
    fn new_tmp() {
        let p = "s03 === ( *s ( +s s01 s02 ) s01 ) ;";
        assert_eq!(run("stm1 NewTmp Nl s09", p).unwrap(), "s09 = ( +s s01 s02 ) ; s03 === ( *s s09 s01 ) ;");
        assert_eq!(run("stm1 NewTmp Nl s02", p), Err(ApplyError::VarConflict));
        assert_eq!(run("stm1 NewTmp Nl v02", p), Err(ApplyError::TypeMismatch));
    }

    #[test]
    fn rename() {
        let p = "s05 = ( +s s01 s02 ) ; s06 = ( *s s05 s05 ) ; s05 = s06 ; s03 === ( -s s05 s06 ) ;";
        assert_eq!(
            run("stm1 Rename s07", p).unwrap(),
            "s07 = ( +s s01 s02 ) ; s06 = ( *s s07 s07 ) ; s05 = s06 ; s03 === ( -s s05 s06 ) ;"
        );
        assert_eq!(run("stm1 Rename s01", p), Err(ApplyError::VarConflict));
        assert_eq!(run("stm1 Rename s06", p), Err(ApplyError::VarConflict));
        assert_eq!(run("stm1 Rename v01", p), Err(ApplyError::TypeMismatch));
        assert_eq!(run("stm4 Rename s09", p), Err(ApplyError::IllegalPattern));
        // the reassignment's own right-hand side reads the renamed value
        let q = "s05 = s01 ; s05 = ( +s s05 s02 ) ; s03 === s05 ;";
        assert_eq!(run("stm1 Rename s07", q).unwrap(), "s07 = s01 ; s05 = ( +s s07 s02 ) ; s03 === s05 ;");
    }

    #[test]
    fn limits_are_enforced() {
        let deep = "s01 === ( +s ( +s ( +s ( +s ( +s s02 s03 ) s03 ) s03 ) s03 ) s03 ) ;";
        assert_eq!(run("stm1 AddZero Nllll", deep), Err(ApplyError::LimitExceeded));
    }

    #[test]
    fn enumeration_examples() {
        let rules: Vec<String> =
            enumerate_legal(&prog("s03 === ( +s s01 s02 ) ;")).iter().map(|r| r.to_string()).collect();
        assert!(rules.contains(&"stm1 Commute N".to_string()));
        assert!(rules.contains(&"stm1 AddZero N".to_string()));
        assert!(!rules.iter().any(|r| r.contains("SwapPrev")));
        let mut sorted = enumerate_legal(&prog("s03 = ( +s s01 s02 ) ; s04 === ( *s s03 s03 ) ;"));
        let original = sorted.clone();
        sorted.sort_by_key(|r| (r.stm, r.name, r.path, r.var));
        assert_eq!(sorted, original);
    }
}
