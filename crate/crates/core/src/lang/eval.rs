//! Randomized semantic oracle: programs run over a prime field, vectors are
//! fixed-length arrays of field elements and opaque functions are a keyed hash
//! of their arguments. Agreement on random inputs can falsify an equivalence
//! claim but never certify one.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use super::expr::Expr;
use super::program::Program;
use super::token::{BinOp, Const, TypeTag, UnOp, VarId};

pub const MERSENNE_61: u64 = (1 << 61) - 1;
pub const DEFAULT_VECTOR_LEN: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Scalar(u64),
    Vector(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("no value supplied for {0}")]
    MissingInput(VarId),
    #[error("value for {0} has the wrong type or length")]
    BadValue(VarId),
}

#[derive(Debug, Clone)]
pub struct EvalEnv {
    pub prime: u64,
    pub vector_len: usize,
    pub values: BTreeMap<VarId, Value>,
    pub func_seed: u64,
}

impl EvalEnv {
    pub fn new(values: BTreeMap<VarId, Value>, func_seed: u64) -> EvalEnv {
        EvalEnv { prime: MERSENNE_61, vector_len: DEFAULT_VECTOR_LEN, values, func_seed }
    }

    /// Uniform random values over GF(2^61-1) for every variable in `inputs`.
    pub fn random<R: Rng>(inputs: impl IntoIterator<Item = VarId>, rng: &mut R) -> EvalEnv {
        let prime = MERSENNE_61;
        let values = inputs
            .into_iter()
            .map(|v| {
                let value = match v.ty() {
                    TypeTag::Scalar => Value::Scalar(rng.gen_range(0..prime)),
                    TypeTag::Vector => {
                        Value::Vector((0..DEFAULT_VECTOR_LEN).map(|_| rng.gen_range(0..prime)).collect())
                    }
                };
                (v, value)
            })
            .collect();
        EvalEnv::new(values, rng.gen())
    }
}

struct Field {
    p: u64,
}

impl Field {
    fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b % self.p)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.p as u128) as u64
    }

    fn neg(&self, a: u64) -> u64 {
        (self.p - a % self.p) % self.p
    }

    fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn div(&self, a: u64, b: u64) -> Result<u64, EvalError> {
        if b % self.p == 0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(self.mul(a, self.pow(b, self.p - 2)))
    }
}

pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

struct Machine<'a> {
    env: &'a EvalEnv,
    field: Field,
    vars: BTreeMap<VarId, Value>,
}

impl Machine<'_> {
    fn scalar(&self, v: Value) -> u64 {
        match v {
            Value::Scalar(x) => x,
            Value::Vector(_) => unreachable!("type-checked program"),
        }
    }

    fn vector(&self, v: Value) -> Vec<u64> {
        match v {
            Value::Vector(x) => x,
            Value::Scalar(_) => unreachable!("type-checked program"),
        }
    }

    fn eval(&self, e: &Expr) -> Result<Value, EvalError> {
        let f = &self.field;
        Ok(match e {
            Expr::Var(v) => self.vars.get(v).cloned().ok_or(EvalError::MissingInput(*v))?,
            Expr::Const(Const::ZeroS) => Value::Scalar(0),
            Expr::Const(Const::OneS) => Value::Scalar(1),
            Expr::Const(Const::ZeroV) => Value::Vector(vec![0; self.env.vector_len]),
            Expr::Unary(UnOp::NegS, a) => Value::Scalar(f.neg(self.scalar(self.eval(a)?))),
            Expr::Unary(UnOp::NegV, a) => {
                Value::Vector(self.vector(self.eval(a)?).into_iter().map(|x| f.neg(x)).collect())
            }
            Expr::Binary(op, l, r) => {
                let (lv, rv) = (self.eval(l)?, self.eval(r)?);
                match op {
                    BinOp::AddS => Value::Scalar(f.add(self.scalar(lv), self.scalar(rv))),
                    BinOp::SubS => Value::Scalar(f.sub(self.scalar(lv), self.scalar(rv))),
                    BinOp::MulS => Value::Scalar(f.mul(self.scalar(lv), self.scalar(rv))),
                    BinOp::DivS => Value::Scalar(f.div(self.scalar(lv), self.scalar(rv))?),
                    BinOp::AddV | BinOp::SubV => {
                        let (a, b) = (self.vector(lv), self.vector(rv));
                        Value::Vector(
                            a.into_iter()
                                .zip(b)
                                .map(|(x, y)| if *op == BinOp::AddV { f.add(x, y) } else { f.sub(x, y) })
                                .collect(),
                        )
                    }
                    BinOp::MulSV => {
                        let k = self.scalar(lv);
                        Value::Vector(self.vector(rv).into_iter().map(|x| f.mul(k, x)).collect())
                    }
                }
            }
            Expr::Call(func, args) => {
                let mut h = splitmix(self.env.func_seed ^ func.ordinal().wrapping_mul(0x100_0000_01b3));
                for a in args {
                    match self.eval(a)? {
                        Value::Scalar(x) => h = splitmix(h ^ x),
                        Value::Vector(xs) => {
                            for x in xs {
                                h = splitmix(h ^ x);
                            }
                            h = splitmix(h ^ 0x5eed);
                        }
                    }
                }
                match func.result_ty() {
                    TypeTag::Scalar => Value::Scalar(h % f.p),
                    TypeTag::Vector => Value::Vector(
                        (0..self.env.vector_len as u64).map(|j| splitmix(h ^ j.wrapping_mul(0x9e37)) % f.p).collect(),
                    ),
                }
            }
        })
    }
}

/// Runs the statements in order and returns the value of each output.
pub fn evaluate(p: &Program, env: &EvalEnv) -> Result<BTreeMap<VarId, Value>, EvalError> {
    let mut m = Machine { env, field: Field { p: env.prime }, vars: BTreeMap::new() };
    for v in p.inputs() {
        let value = env.values.get(&v).ok_or(EvalError::MissingInput(v))?;
        let ok = match (v.ty(), value) {
            (TypeTag::Scalar, Value::Scalar(_)) => true,
            (TypeTag::Vector, Value::Vector(xs)) => xs.len() == env.vector_len,
            _ => false,
        };
        if !ok {
            return Err(EvalError::BadValue(v));
        }
        m.vars.insert(v, value.clone());
    }
    let mut outputs = BTreeMap::new();
    for s in p.stmts() {
        let value = m.eval(&s.rhs)?;
        if s.is_output {
            outputs.insert(s.target, value.clone());
        }
        m.vars.insert(s.target, value);
    }
    Ok(outputs)
}

/// Outcome of comparing two programs on random environments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpotCheck {
    /// All sampled environments agreed.
    Agree { trials: usize },
    /// A counterexample environment was found.
    Differ,
    /// Too many environments hit a zero divisor.
    Inconclusive,
}

/// Evaluates `a` and `b` on `trials` shared random environments, resampling
/// any environment in which either program divides by zero.
pub fn spot_check<R: Rng>(a: &Program, b: &Program, trials: usize, rng: &mut R) -> SpotCheck {
    let inputs: BTreeSet<VarId> = a.inputs().union(&b.inputs()).copied().collect();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > trials * 20 + 20 {
            return SpotCheck::Inconclusive;
        }
        let env = EvalEnv::random(inputs.iter().copied(), rng);
        match (evaluate(a, &env), evaluate(b, &env)) {
            (Ok(x), Ok(y)) => {
                if x != y {
                    return SpotCheck::Differ;
                }
                done += 1;
            }
            (Err(EvalError::DivisionByZero), _) | (_, Err(EvalError::DivisionByZero)) => continue,
            _ => return SpotCheck::Differ,
        }
    }
    SpotCheck::Agree { trials }
}
