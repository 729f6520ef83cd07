use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::expr::Expr;
use super::program::{Program, Stmt};
use super::token::{TypeTag, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{needed} distinct {ty} variables exceed the vocabulary of {available}")]
pub struct EncodeError {
    pub ty: TypeTag,
    pub needed: usize,
    pub available: usize,
}

/// A type-preserving bijection between variable tokens.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    map: BTreeMap<VarId, VarId>,
}

impl Renaming {
    pub fn from_map(map: BTreeMap<VarId, VarId>) -> Renaming {
        debug_assert!(map.iter().all(|(a, b)| a.ty() == b.ty()));
        debug_assert_eq!(map.values().collect::<BTreeSet<_>>().len(), map.len());
        Renaming { map }
    }

    /// Maps `vars` onto tokens drawn uniformly without replacement.
    pub fn random(vars: &BTreeSet<VarId>, rng: &mut impl rand::Rng) -> Result<Renaming, EncodeError> {
        let mut map = BTreeMap::new();
        for ty in [TypeTag::Scalar, TypeTag::Vector] {
            let mine: Vec<VarId> = vars.iter().copied().filter(|v| v.ty() == ty).collect();
            let mut pool: Vec<VarId> = VarId::all_of(ty).collect();
            if mine.len() > pool.len() {
                return Err(EncodeError { ty, needed: mine.len(), available: pool.len() });
            }
            pool.shuffle(rng);
            map.extend(mine.into_iter().zip(pool));
        }
        Ok(Renaming { map })
    }

    pub fn var(&self, v: VarId) -> VarId {
        self.map.get(&v).copied().unwrap_or(v)
    }

    pub fn map(&self) -> &BTreeMap<VarId, VarId> {
        &self.map
    }

    pub fn expr(&self, e: &Expr) -> Expr {
        match e {
            Expr::Var(v) => Expr::Var(self.var(*v)),
            Expr::Const(c) => Expr::Const(*c),
            Expr::Unary(op, a) => Expr::unary(*op, self.expr(a)),
            Expr::Binary(op, l, r) => Expr::binary(*op, self.expr(l), self.expr(r)),
            Expr::Call(f, args) => Expr::Call(*f, args.iter().map(|a| self.expr(a)).collect()),
        }
    }

    /// Renames every variable of `p`. Variables outside the map are kept, so
    /// the map must be injective over the program's variables.
    pub fn program(&self, p: &Program) -> Program {
        let stmts = p
            .stmts()
            .iter()
            .map(|s| Stmt { target: self.var(s.target), is_output: s.is_output, rhs: self.expr(&s.rhs) })
            .collect();
        Program::new(stmts).expect("bijective renaming preserves well-formedness")
    }
}

/// Randomly reassigns every variable of `p` to a fresh token, deterministically
/// per seed.
pub fn encode_rename(p: &Program, seed: u64) -> Result<(Program, Renaming), EncodeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let renaming = Renaming::random(&p.vars(), &mut rng)?;
    Ok((renaming.program(p), renaming))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::eval::{evaluate, EvalEnv};
    use crate::lang::prefix::parse_prefix;

    #[test]
    fn seeds_give_different_names_and_are_deterministic() {
        let p = parse_prefix("s01 = ( -s s02 s03 ) ; s04 === ( /s s03 s01 ) ;").unwrap();
        let (a, _) = encode_rename(&p, 1).unwrap();
        let (b, _) = encode_rename(&p, 1).unwrap();
        assert_eq!(a, b);
        let distinct: BTreeSet<String> = (0..20).map(|s| encode_rename(&p, s).unwrap().0.to_prefix()).collect();
        assert!(distinct.len() > 10);
    }

    #[test]
    fn renaming_preserves_outputs_under_matched_inputs() {
        let p = parse_prefix("v01 = ( *sv s01 v02 ) ; s04 === ( g1s ( +v v01 v02 ) ) ;").unwrap();
        let (q, ren) = encode_rename(&p, 42).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let env = EvalEnv::random(p.inputs(), &mut rng);
        let renamed_env =
            EvalEnv { values: env.values.iter().map(|(k, v)| (ren.var(*k), v.clone())).collect(), ..env.clone() };
        let out_p = evaluate(&p, &env).unwrap();
        let out_q = evaluate(&q, &renamed_env).unwrap();
        let mapped: BTreeMap<_, _> = out_p.into_iter().map(|(k, v)| (ren.var(k), v)).collect();
        assert_eq!(mapped, out_q);
    }
}
