//! Random straight-line programs, built from the outputs backwards.

use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{evaluate, BinOp, Const, EvalEnv, Expr, Func, FuncFamily, Program, Stmt, TypeTag, UnOp, VarId};

use super::config::{GenConfig, OpWeights};
use super::GenError;

/// Draws an index with probability proportional to `weights`; `None` when no
/// weight is positive.
pub(crate) fn weighted_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    WeightedIndex::new(weights).ok().map(|d| d.sample(rng))
}

struct Builder<'a, R> {
    cfg: &'a GenConfig,
    rng: &'a mut R,
    /// In program order; definitions are prepended.
    stmts: Vec<Stmt>,
    used: BTreeSet<VarId>,
    inputs: BTreeSet<VarId>,
}

impl<R: Rng> Builder<'_, R> {
    fn fresh(&mut self, ty: TypeTag) -> Option<VarId> {
        let v = VarId::all_of(ty).filter(|v| !self.used.contains(v)).choose(self.rng)?;
        self.used.insert(v);
        Some(v)
    }

    fn leaf(&mut self, ty: TypeTag, defining: Option<VarId>) -> Expr {
        if self.rng.gen_bool(self.cfg.const_leaf_prob) {
            return Expr::Const(match ty {
                TypeTag::Scalar if self.rng.gen_bool(0.6) => Const::OneS,
                _ => Const::zero(ty),
            });
        }
        let reusable = |v: &&VarId| v.ty() == ty && Some(**v) != defining;
        if self.rng.gen_bool(self.cfg.reuse_input_prob) {
            if let Some(v) = self.inputs.iter().filter(reusable).choose(self.rng) {
                return Expr::Var(*v);
            }
        }
        if let Some(v) = self.fresh(ty) {
            self.inputs.insert(v);
            return Expr::Var(v);
        }
        match self.inputs.iter().filter(reusable).choose(self.rng) {
            Some(v) => Expr::Var(*v),
            None => Expr::Const(Const::zero(ty)),
        }
    }

    fn expr(&mut self, ty: TypeTag, depth: usize, root: bool, defining: Option<VarId>) -> Expr {
        if depth <= 1 || (!root && self.rng.gen_bool(self.cfg.early_leaf_prob)) {
            return self.leaf(ty, defining);
        }
        if depth >= 3 && self.rng.gen_bool(self.cfg.pattern_prob) {
            return self.pattern(ty, depth, defining);
        }
        let w: &OpWeights = match ty {
            TypeTag::Scalar => &self.cfg.scalar_ops,
            TypeTag::Vector => &self.cfg.vector_ops,
        };
        let weights = [w.add, w.sub, w.mul, w.div, w.neg, w.call_pair, w.call_vector];
        let choice = weighted_index(&weights, self.rng).unwrap_or(0);
        let d = depth - 1;
        use TypeTag::*;
        match (choice, ty) {
            (0, _) => self.bin(BinOp::add(ty), d, defining),
            (1, _) => self.bin(BinOp::sub(ty), d, defining),
            (2, Scalar) => self.bin(BinOp::MulS, d, defining),
            (2, Vector) => self.bin(BinOp::MulSV, d, defining),
            (3, Scalar) => self.bin(BinOp::DivS, d, defining),
            (4, _) => {
                let e = self.expr(ty, d, false, defining);
                Expr::unary(UnOp::neg(ty), e)
            }
            (5, Scalar) => self.call(FuncFamily::ScalarPairToScalar, d, defining),
            (5, Vector) => self.call(FuncFamily::ScalarPairToVector, d, defining),
            (6, Scalar) => self.call(FuncFamily::VectorToScalar, d, defining),
            (6, Vector) => self.call(FuncFamily::VectorPairToVector, d, defining),
            _ => self.bin(BinOp::add(ty), d, defining),
        }
    }

    fn bin(&mut self, op: BinOp, d: usize, defining: Option<VarId>) -> Expr {
        let (lt, rt, _) = op.signature();
        let l = self.expr(lt, d, false, defining);
        let r = self.expr(rt, d, false, defining);
        Expr::binary(op, l, r)
    }

    fn call(&mut self, family: FuncFamily, d: usize, defining: Option<VarId>) -> Expr {
        let f = Func::new(family, self.rng.gen_range(1..=family.count())).expect("index in range");
        let args = f.params().iter().map(|&t| self.expr(t, d, false, defining)).collect();
        Expr::Call(f, args)
    }

    /// Shapes that plain operator sampling rarely produces: shared factors,
    /// self-cancellations, neutral and absorbing constants, double negation.
    fn pattern(&mut self, ty: TypeTag, depth: usize, defining: Option<VarId>) -> Expr {
        use TypeTag::*;
        let (d1, d2) = (depth - 1, depth - 2);
        let add_or_sub = if self.rng.gen_bool(0.5) { BinOp::add(ty) } else { BinOp::sub(ty) };
        let mul = match ty {
            Scalar => BinOp::MulS,
            Vector => BinOp::MulSV,
        };
        match self.rng.gen_range(0..7) {
            0 => {
                let a = self.expr(Scalar, d2, false, defining);
                let b = self.expr(ty, d2, false, defining);
                let c = self.expr(ty, d2, false, defining);
                Expr::binary(add_or_sub, Expr::binary(mul, a.clone(), b), Expr::binary(mul, a, c))
            }
            1 => {
                let a = self.expr(Scalar, d2, false, defining);
                let b = self.expr(Scalar, d2, false, defining);
                let c = self.expr(ty, d2, false, defining);
                let m = if ty == Scalar && self.rng.gen_bool(0.3) { BinOp::DivS } else { mul };
                Expr::binary(add_or_sub, Expr::binary(m, a, c.clone()), Expr::binary(m, b, c))
            }
            2 => {
                let e = self.expr(ty, d1, false, defining);
                let op = if ty == Scalar && self.rng.gen_bool(0.4) { BinOp::DivS } else { BinOp::sub(ty) };
                Expr::binary(op, e.clone(), e)
            }
            3 => {
                let e = self.expr(ty, d1, false, defining);
                let zero = Expr::Const(Const::zero(ty));
                let one = Expr::Const(Const::OneS);
                match (ty, self.rng.gen_range(0..4)) {
                    (_, 0) => Expr::binary(BinOp::add(ty), zero, e),
                    (_, 1) => Expr::binary(BinOp::sub(ty), e, zero),
                    (Scalar, 2) => Expr::binary(BinOp::DivS, e, one),
                    _ => Expr::binary(mul, one, e),
                }
            }
            4 => {
                let e = self.expr(ty, d1, false, defining);
                match ty {
                    Scalar => Expr::binary(BinOp::MulS, e, Expr::Const(Const::ZeroS)),
                    Vector => Expr::binary(BinOp::MulSV, Expr::Const(Const::ZeroS), e),
                }
            }
            5 => {
                let e = self.expr(ty, d2, false, defining);
                if ty == Scalar && self.rng.gen_bool(0.3) {
                    let one = Expr::Const(Const::OneS);
                    Expr::binary(BinOp::DivS, one.clone(), Expr::binary(BinOp::DivS, one, e))
                } else {
                    Expr::unary(UnOp::neg(ty), Expr::unary(UnOp::neg(ty), e))
                }
            }
            _ => {
                let a = self.expr(ty, d2, false, defining);
                let b = self.expr(ty, d2, false, defining);
                Expr::unary(UnOp::neg(ty), Expr::binary(BinOp::sub(ty), a, b))
            }
        }
    }

    fn statement_depth(&mut self) -> usize {
        let max = self.cfg.limits.max_depth.min(self.cfg.depth_weights.len());
        weighted_index(&self.cfg.depth_weights[..max], self.rng).map_or(1, |i| i + 1)
    }

    /// A subtree of some existing statement that could be computed at the
    /// start of the program.
    fn duplicable(&mut self, ty: TypeTag, defining: VarId) -> Option<Expr> {
        let mut found = Vec::new();
        for s in &self.stmts {
            collect_subtrees(&s.rhs, &mut |e| {
                if !e.is_leaf()
                    && e.ty() == ty
                    && e.depth() < self.cfg.limits.max_depth
                    && e.vars().iter().all(|v| *v != defining && self.inputs.contains(v))
                {
                    found.push(e.clone());
                }
            });
        }
        found.choose(self.rng).cloned()
    }

    fn build(mut self) -> Option<Program> {
        let n_outputs = weighted_index(&self.cfg.output_weights, self.rng)? + 1;
        let n_stmts = (weighted_index(&self.cfg.statement_weights, self.rng)? + 1)
            .clamp(n_outputs, self.cfg.limits.max_statements.max(n_outputs));
        for _ in 0..n_outputs {
            let ty = if self.rng.gen_bool(self.cfg.vector_output_prob) { TypeTag::Vector } else { TypeTag::Scalar };
            let o = self.fresh(ty)?;
            let depth = self.statement_depth();
            let rhs = self.expr(ty, depth, true, None);
            self.stmts.push(Stmt::output(o, rhs));
        }
        while self.stmts.len() < n_stmts {
            let Some(&v) = self.inputs.iter().choose(self.rng) else {
                break;
            };
            let dup = if self.rng.gen_bool(self.cfg.duplicate_prob) { self.duplicable(v.ty(), v) } else { None };
            self.inputs.remove(&v);
            let rhs = match dup {
                Some(e) => e,
                None => {
                    let depth = self.statement_depth();
                    self.expr(v.ty(), depth, true, Some(v))
                }
            };
            self.stmts.insert(0, Stmt::assign(v, rhs));
        }
        let p = Program::new(self.stmts).ok()?;
        self.cfg.limits.admits(&p).then_some(p)
    }
}

fn collect_subtrees(e: &Expr, f: &mut impl FnMut(&Expr)) {
    f(e);
    for c in e.children() {
        collect_subtrees(c, f);
    }
}

/// Whether some random environment evaluates `p` without a zero divisor.
/// Programs failing this divide by a structurally zero expression.
fn is_defined<R: Rng>(p: &Program, rng: &mut R) -> bool {
    (0..3).any(|_| evaluate(p, &EvalEnv::random(p.inputs(), rng)).is_ok())
}

/// One program drawn from `rng`, retrying on limit violations and on
/// programs that are undefined everywhere.
pub fn prog_a_with<R: Rng>(cfg: &GenConfig, rng: &mut R) -> Result<Program, GenError> {
    for _ in 0..cfg.max_retries.max(1) * 20 {
        let builder =
            Builder { cfg, rng: &mut *rng, stmts: Vec::new(), used: BTreeSet::new(), inputs: BTreeSet::new() };
        if let Some(p) = builder.build() {
            if is_defined(&p, rng) {
                return Ok(p);
            }
        }
    }
    Err(GenError::RetriesExhausted)
}

/// Deterministic per seed.
pub fn generate_prog_a(cfg: &GenConfig, seed: u64) -> Result<Program, GenError> {
    prog_a_with(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_within_limits() {
        let cfg = GenConfig::default();
        for seed in 0..200 {
            let p = generate_prog_a(&cfg, seed).unwrap();
            assert_eq!(p, generate_prog_a(&cfg, seed).unwrap());
            assert!(cfg.limits.admits(&p), "{p}");
            assert!(p.output_count() >= 1);
        }
    }

    #[test]
    fn minimal_grammar() {
        let cfg = GenConfig {
            statement_weights: vec![1.0],
            output_weights: vec![1.0],
            depth_weights: vec![0.0, 1.0],
            vector_output_prob: 0.0,
            const_leaf_prob: 0.0,
            ..GenConfig::default()
        };
        for seed in 0..20 {
            let p = generate_prog_a(&cfg, seed).unwrap();
            assert_eq!(p.len(), 1);
            assert!(p.stmts()[0].is_output);
            assert!(p.node_count() <= 3);
            assert_eq!(p.max_depth(), 2);
        }
    }

    #[test]
    fn weighted_index_respects_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(weighted_index(&[0.0, 2.0, 0.0], &mut rng), Some(1));
        }
        assert_eq!(weighted_index(&[0.0], &mut rng), None);
    }
}
