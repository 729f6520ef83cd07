//! Closed token vocabulary of the program language.
//!
//! Scalar variables are `s01..s30`, vector variables `v01..v15`. Operators and
//! opaque functions carry their type signature in the token itself so a
//! prefix string can be type-checked without any declarations.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub const MAX_SCALAR_VARS: u8 = 30;
pub const MAX_VECTOR_VARS: u8 = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeTag {
    Scalar,
    Vector,
}

impl TypeTag {
    pub fn suffix(self) -> char {
        match self {
            TypeTag::Scalar => 's',
            TypeTag::Vector => 'v',
        }
    }
}

impl fmt::Display for TypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTag::Scalar => f.write_str("scalar"),
            TypeTag::Vector => f.write_str("vector"),
        }
    }
}

/// A variable token. The index is 1-based, as printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    ty: TypeTag,
    index: u8,
}

impl VarId {
    pub fn new(ty: TypeTag, index: u8) -> Option<VarId> {
        let max = match ty {
            TypeTag::Scalar => MAX_SCALAR_VARS,
            TypeTag::Vector => MAX_VECTOR_VARS,
        };
        (1..=max).contains(&index).then_some(VarId { ty, index })
    }

    pub fn scalar(index: u8) -> VarId {
        VarId::new(TypeTag::Scalar, index).expect("scalar variable index out of range")
    }

    pub fn vector(index: u8) -> VarId {
        VarId::new(TypeTag::Vector, index).expect("vector variable index out of range")
    }

    pub fn ty(self) -> TypeTag {
        self.ty
    }

    pub fn index(self) -> u8 {
        self.index
    }

    /// Every variable token of the given type, in vocabulary order.
    pub fn all_of(ty: TypeTag) -> impl Iterator<Item = VarId> {
        let max = match ty {
            TypeTag::Scalar => MAX_SCALAR_VARS,
            TypeTag::Vector => MAX_VECTOR_VARS,
        };
        (1..=max).map(move |index| VarId { ty, index })
    }

    /// Scalars first, then vectors.
    pub fn all() -> impl Iterator<Item = VarId> {
        VarId::all_of(TypeTag::Scalar).chain(VarId::all_of(TypeTag::Vector))
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:02}", self.ty.suffix(), self.index)
    }
}

impl FromStr for VarId {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 3 || !bytes[1].is_ascii_digit() || !bytes[2].is_ascii_digit() {
            return Err(());
        }
        let ty = match bytes[0] {
            b's' => TypeTag::Scalar,
            b'v' => TypeTag::Vector,
            _ => return Err(()),
        };
        let index = (bytes[1] - b'0') * 10 + (bytes[2] - b'0');
        VarId::new(ty, index).ok_or(())
    }
}

impl Serialize for VarId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VarId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(|_| serde::de::Error::custom(format!("invalid variable token `{text}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Const {
    ZeroS,
    OneS,
    ZeroV,
}

impl Const {
    pub fn ty(self) -> TypeTag {
        match self {
            Const::ZeroS | Const::OneS => TypeTag::Scalar,
            Const::ZeroV => TypeTag::Vector,
        }
    }

    pub fn zero(ty: TypeTag) -> Const {
        match ty {
            TypeTag::Scalar => Const::ZeroS,
            TypeTag::Vector => Const::ZeroV,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Const::ZeroS => "0s",
            Const::OneS => "1s",
            Const::ZeroV => "0v",
        }
    }

    pub fn from_token(tok: &str) -> Option<Const> {
        Some(match tok {
            "0s" => Const::ZeroS,
            "1s" => Const::OneS,
            "0v" => Const::ZeroV,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnOp {
    NegS,
    NegV,
}

impl UnOp {
    pub fn neg(ty: TypeTag) -> UnOp {
        match ty {
            TypeTag::Scalar => UnOp::NegS,
            TypeTag::Vector => UnOp::NegV,
        }
    }

    pub fn ty(self) -> TypeTag {
        match self {
            UnOp::NegS => TypeTag::Scalar,
            UnOp::NegV => TypeTag::Vector,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            UnOp::NegS => "ns",
            UnOp::NegV => "nv",
        }
    }

    pub fn from_token(tok: &str) -> Option<UnOp> {
        match tok {
            "ns" => Some(UnOp::NegS),
            "nv" => Some(UnOp::NegV),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOp {
    AddS,
    SubS,
    MulS,
    DivS,
    AddV,
    SubV,
    /// Scalar times vector; the scalar is always the left operand.
    MulSV,
}

impl BinOp {
    pub const ALL: [BinOp; 7] =
        [BinOp::AddS, BinOp::SubS, BinOp::MulS, BinOp::DivS, BinOp::AddV, BinOp::SubV, BinOp::MulSV];

    pub fn add(ty: TypeTag) -> BinOp {
        match ty {
            TypeTag::Scalar => BinOp::AddS,
            TypeTag::Vector => BinOp::AddV,
        }
    }

    pub fn sub(ty: TypeTag) -> BinOp {
        match ty {
            TypeTag::Scalar => BinOp::SubS,
            TypeTag::Vector => BinOp::SubV,
        }
    }

    /// `(left, right) -> result`
    pub fn signature(self) -> (TypeTag, TypeTag, TypeTag) {
        use TypeTag::*;
        match self {
            BinOp::AddS | BinOp::SubS | BinOp::MulS | BinOp::DivS => (Scalar, Scalar, Scalar),
            BinOp::AddV | BinOp::SubV => (Vector, Vector, Vector),
            BinOp::MulSV => (Scalar, Vector, Vector),
        }
    }

    pub fn result_ty(self) -> TypeTag {
        self.signature().2
    }

    pub fn is_add(self) -> bool {
        matches!(self, BinOp::AddS | BinOp::AddV)
    }

    pub fn is_sub(self) -> bool {
        matches!(self, BinOp::SubS | BinOp::SubV)
    }

    pub fn is_additive(self) -> bool {
        self.is_add() || self.is_sub()
    }

    /// The addition or subtraction of type `ty` matching this additive op.
    pub fn additive_of(self, ty: TypeTag) -> BinOp {
        debug_assert!(self.is_additive());
        if self.is_add() {
            BinOp::add(ty)
        } else {
            BinOp::sub(ty)
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            BinOp::AddS => "+s",
            BinOp::SubS => "-s",
            BinOp::MulS => "*s",
            BinOp::DivS => "/s",
            BinOp::AddV => "+v",
            BinOp::SubV => "-v",
            BinOp::MulSV => "*sv",
        }
    }

    pub fn from_token(tok: &str) -> Option<BinOp> {
        BinOp::ALL.into_iter().find(|op| op.token() == tok)
    }
}

/// Opaque function families, named by the token prefix and result suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FuncFamily {
    /// `f#s`: (scalar, scalar) -> scalar
    ScalarPairToScalar,
    /// `f#v`: (scalar, scalar) -> vector
    ScalarPairToVector,
    /// `g#s`: (vector) -> scalar
    VectorToScalar,
    /// `g#v`: (vector, vector) -> vector
    VectorPairToVector,
}

impl FuncFamily {
    pub const ALL: [FuncFamily; 4] = [
        FuncFamily::ScalarPairToScalar,
        FuncFamily::ScalarPairToVector,
        FuncFamily::VectorToScalar,
        FuncFamily::VectorPairToVector,
    ];

    pub fn count(self) -> u8 {
        match self {
            FuncFamily::ScalarPairToScalar | FuncFamily::ScalarPairToVector => 5,
            FuncFamily::VectorToScalar | FuncFamily::VectorPairToVector => 3,
        }
    }

    pub fn params(self) -> &'static [TypeTag] {
        use TypeTag::*;
        match self {
            FuncFamily::ScalarPairToScalar | FuncFamily::ScalarPairToVector => &[Scalar, Scalar],
            FuncFamily::VectorToScalar => &[Vector],
            FuncFamily::VectorPairToVector => &[Vector, Vector],
        }
    }

    pub fn result_ty(self) -> TypeTag {
        match self {
            FuncFamily::ScalarPairToScalar | FuncFamily::VectorToScalar => TypeTag::Scalar,
            FuncFamily::ScalarPairToVector | FuncFamily::VectorPairToVector => TypeTag::Vector,
        }
    }

    fn prefix(self) -> char {
        match self {
            FuncFamily::ScalarPairToScalar | FuncFamily::ScalarPairToVector => 'f',
            FuncFamily::VectorToScalar | FuncFamily::VectorPairToVector => 'g',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Func {
    family: FuncFamily,
    index: u8,
}

impl Func {
    pub fn new(family: FuncFamily, index: u8) -> Option<Func> {
        (1..=family.count()).contains(&index).then_some(Func { family, index })
    }

    pub fn family(self) -> FuncFamily {
        self.family
    }

    pub fn index(self) -> u8 {
        self.index
    }

    pub fn arity(self) -> usize {
        self.family.params().len()
    }

    pub fn params(self) -> &'static [TypeTag] {
        self.family.params()
    }

    pub fn result_ty(self) -> TypeTag {
        self.family.result_ty()
    }

    pub fn all() -> impl Iterator<Item = Func> {
        FuncFamily::ALL.into_iter().flat_map(|family| (1..=family.count()).map(move |index| Func { family, index }))
    }

    /// Stable small integer used to key the opaque-function hash.
    pub fn ordinal(self) -> u64 {
        let base = match self.family {
            FuncFamily::ScalarPairToScalar => 0,
            FuncFamily::ScalarPairToVector => 10,
            FuncFamily::VectorToScalar => 20,
            FuncFamily::VectorPairToVector => 30,
        };
        base + u64::from(self.index)
    }
}

impl fmt::Display for Func {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.family.prefix(), self.index, self.family.result_ty().suffix())
    }
}

impl FromStr for Func {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 3 || !bytes[1].is_ascii_digit() {
            return Err(());
        }
        let family = match (bytes[0], bytes[2]) {
            (b'f', b's') => FuncFamily::ScalarPairToScalar,
            (b'f', b'v') => FuncFamily::ScalarPairToVector,
            (b'g', b's') => FuncFamily::VectorToScalar,
            (b'g', b'v') => FuncFamily::VectorPairToVector,
            _ => return Err(()),
        };
        Func::new(family, bytes[1] - b'0').ok_or(())
    }
}
