//! Local algebraic identities behind the node-addressed rules. Each function
//! either rewrites the given subtree or reports that its pattern does not
//! match.

use crate::lang::{BinOp, Const, Expr, TypeTag};

use super::rule::RuleName;

fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
    Expr::binary(op, l, r)
}

fn zero(ty: TypeTag) -> Expr {
    Expr::Const(Const::zero(ty))
}

fn one() -> Expr {
    Expr::Const(Const::OneS)
}

fn is_zero(e: &Expr) -> bool {
    e.is_const(Const::ZeroS) || e.is_const(Const::ZeroV)
}

fn is_one(e: &Expr) -> bool {
    e.is_const(Const::OneS)
}

/// Applies node rule `rule` at the root of `e`.
pub fn rewrite_node(rule: RuleName, e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let ty = e.ty();
    let e2 = e.clone();
    match rule {
        RuleName::AddZero => Some(bin(BinOp::add(ty), zero(ty), e2)),
        RuleName::SubZero => Some(bin(BinOp::sub(ty), e2, zero(ty))),
        RuleName::MultOne => Some(match ty {
            TypeTag::Scalar => bin(MulS, one(), e2),
            TypeTag::Vector => bin(MulSV, one(), e2),
        }),
        RuleName::DivOne => (ty == TypeTag::Scalar).then(|| bin(DivS, e2, one())),
        RuleName::NeutralOp => neutral(e),
        RuleName::Cancel => match e {
            Expr::Binary(SubS | SubV, l, r) if l == r => Some(zero(ty)),
            Expr::Binary(DivS, l, r) if l == r => Some(one()),
            _ => None,
        },
        RuleName::DoubleOp => match e {
            Expr::Unary(op, inner) => match &**inner {
                Expr::Unary(op2, x) if op == op2 => Some((**x).clone()),
                _ => None,
            },
            Expr::Binary(DivS, l, r) if is_one(l) => match &**r {
                Expr::Binary(DivS, l2, x) if is_one(l2) => Some((**x).clone()),
                _ => None,
            },
            _ => None,
        },
        RuleName::AbsorbOp => match e {
            Expr::Binary(MulS, l, r) if is_zero(l) || is_zero(r) => Some(zero(ty)),
            Expr::Binary(MulSV, l, r) if is_zero(l) || is_zero(r) => Some(zero(ty)),
            _ => None,
        },
        RuleName::Commute => match e {
            Expr::Binary(op @ (AddS | MulS | AddV), l, r) => Some(bin(*op, (**r).clone(), (**l).clone())),
            _ => None,
        },
        RuleName::DistributeLeft => distribute_left(e),
        RuleName::DistributeRight => distribute_right(e),
        RuleName::FactorLeft => factor_left(e),
        RuleName::FactorRight => factor_right(e),
        RuleName::AssociativeLeft => associate_left(e),
        RuleName::AssociativeRight => associate_right(e),
        RuleName::FlipLeft => match e {
            Expr::Unary(neg, inner) => match &**inner {
                Expr::Binary(op, a, b) if op.is_sub() && op.result_ty() == neg.ty() => {
                    Some(bin(*op, (**b).clone(), (**a).clone()))
                }
                _ => None,
            },
            _ => None,
        },
        RuleName::FlipRight => match e {
            Expr::Binary(DivS, a, r) => match &**r {
                Expr::Binary(DivS, b, c) => Some(bin(MulS, (**a).clone(), bin(DivS, (**c).clone(), (**b).clone()))),
                _ => None,
            },
            _ => None,
        },
        RuleName::SwapPrev
        | RuleName::UseVar
        | RuleName::DeleteStm
        | RuleName::Inline
        | RuleName::NewTmp
        | RuleName::Rename => None,
    }
}

fn neutral(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let Expr::Binary(op, l, r) = e else {
        return None;
    };
    let keep = |x: &Expr| Some(x.clone());
    match op {
        AddS | AddV if is_zero(l) => keep(r),
        AddS | AddV if is_zero(r) => keep(l),
        SubS | SubV if is_zero(r) => keep(l),
        MulS if is_one(l) => keep(r),
        MulS if is_one(r) => keep(l),
        MulSV if is_one(l) => keep(r),
        DivS if is_one(r) => keep(l),
        _ => None,
    }
}

fn additive_parts(e: &Expr) -> Option<(BinOp, &Expr, &Expr)> {
    match e {
        Expr::Binary(op, a, b) if op.is_additive() => Some((*op, a, b)),
        _ => None,
    }
}

fn distribute_left(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let Expr::Binary(outer @ (MulS | DivS | MulSV), sum, c) = e else {
        return None;
    };
    let (op, a, b) = additive_parts(sum)?;
    if op.result_ty() != TypeTag::Scalar {
        return None;
    }
    let c = (**c).clone();
    let joined = op.additive_of(outer.result_ty());
    Some(bin(joined, bin(*outer, a.clone(), c.clone()), bin(*outer, b.clone(), c)))
}

fn distribute_right(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let Expr::Binary(outer @ (MulS | MulSV), a, sum) = e else {
        return None;
    };
    let (op, b, c) = additive_parts(sum)?;
    let a = (**a).clone();
    Some(bin(op, bin(*outer, a.clone(), b.clone()), bin(*outer, a, c.clone())))
}

fn factor_left(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let (op, x, y) = additive_parts(e)?;
    match (x, y) {
        (Expr::Binary(m1 @ (MulS | MulSV), a, b), Expr::Binary(m2, a2, c)) if m1 == m2 && a == a2 => {
            Some(bin(*m1, (**a).clone(), bin(op, (**b).clone(), (**c).clone())))
        }
        _ => None,
    }
}

fn factor_right(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let (op, x, y) = additive_parts(e)?;
    match (x, y) {
        (Expr::Binary(m1 @ (MulS | DivS | MulSV), a, c), Expr::Binary(m2, b, c2)) if m1 == m2 && c == c2 => {
            let inner = op.additive_of(TypeTag::Scalar);
            Some(bin(*m1, bin(inner, (**a).clone(), (**b).clone()), (**c).clone()))
        }
        _ => None,
    }
}

fn associate_left(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let Expr::Binary(op, a, r) = e else {
        return None;
    };
    let Expr::Binary(inner, b, c) = &**r else {
        return None;
    };
    let (a, b, c) = ((**a).clone(), (**b).clone(), (**c).clone());
    match (op, inner) {
        (MulS, MulS) | (AddS, AddS) | (AddV, AddV) => Some(bin(*op, bin(*op, a, b), c)),
        (MulS, DivS) => Some(bin(DivS, bin(MulS, a, b), c)),
        (MulSV, MulSV) => Some(bin(MulSV, bin(MulS, a, b), c)),
        _ => None,
    }
}

fn associate_right(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    let Expr::Binary(op, l, c) = e else {
        return None;
    };
    let Expr::Binary(inner, a, b) = &**l else {
        return None;
    };
    let (a, b, c) = ((**a).clone(), (**b).clone(), (**c).clone());
    match (op, inner) {
        (MulS, MulS) | (AddS, AddS) | (AddV, AddV) => Some(bin(*op, a, bin(*op, b, c))),
        (DivS, MulS) => Some(bin(MulS, a, bin(DivS, b, c))),
        (MulSV, MulS) => Some(bin(MulSV, a, bin(MulSV, b, c))),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_prefix;

    fn rhs(text: &str) -> Expr {
        let p = parse_prefix(&format!("s30 === {text} ;")).or_else(|_| parse_prefix(&format!("v15 === {text} ;")));
        p.unwrap().stmts()[0].rhs.clone()
    }

    fn rw(rule: RuleName, text: &str) -> Option<String> {
        rewrite_node(rule, &rhs(text)).map(|e| e.to_string())
    }

    #[test]
    fn insertion_rules() {
        use RuleName::*;
        assert_eq!(rw(AddZero, "s01").unwrap(), "( +s 0s s01 )");
        assert_eq!(rw(AddZero, "v01").unwrap(), "( +v 0v v01 )");
        assert_eq!(rw(SubZero, "v01").unwrap(), "( -v v01 0v )");
        assert_eq!(rw(MultOne, "v01").unwrap(), "( *sv 1s v01 )");
        assert_eq!(rw(MultOne, "( +s s01 s02 )").unwrap(), "( *s 1s ( +s s01 s02 ) )");
        assert_eq!(rw(DivOne, "s01").unwrap(), "( /s s01 1s )");
        assert_eq!(rw(DivOne, "v01"), None);
    }

    #[test]
    fn simplification_rules() {
        use RuleName::*;
        assert_eq!(rw(NeutralOp, "( +s s01 0s )").unwrap(), "s01");
        assert_eq!(rw(NeutralOp, "( -v v01 0v )").unwrap(), "v01");
        assert_eq!(rw(NeutralOp, "( *sv 1s v01 )").unwrap(), "v01");
        assert_eq!(rw(NeutralOp, "( -s 0s s01 )"), None);
        assert_eq!(rw(Cancel, "( -v v01 v01 )").unwrap(), "0v");
        assert_eq!(rw(Cancel, "( /s s02 s02 )").unwrap(), "1s");
        assert_eq!(rw(Cancel, "( /s s02 s03 )"), None);
        assert_eq!(rw(DoubleOp, "( nv ( nv v01 ) )").unwrap(), "v01");
        assert_eq!(rw(DoubleOp, "( /s 1s ( /s 1s s04 ) )").unwrap(), "s04");
        assert_eq!(rw(AbsorbOp, "( *s s01 0s )").unwrap(), "0s");
        assert_eq!(rw(AbsorbOp, "( *sv s01 0v )").unwrap(), "0v");
        assert_eq!(rw(AbsorbOp, "( *sv 0s v01 )").unwrap(), "0v");
    }

    #[test]
    fn structural_rules() {
        use RuleName::*;
        assert_eq!(rw(Commute, "( +s s01 s02 )").unwrap(), "( +s s02 s01 )");
        assert_eq!(rw(Commute, "( -s s01 s02 )"), None);
        assert_eq!(rw(Commute, "( *sv s01 v02 )"), None);
        assert_eq!(rw(DistributeLeft, "( *s ( +s s01 s02 ) s03 )").unwrap(), "( +s ( *s s01 s03 ) ( *s s02 s03 ) )");
        assert_eq!(rw(DistributeLeft, "( /s ( -s s01 s02 ) s03 )").unwrap(), "( -s ( /s s01 s03 ) ( /s s02 s03 ) )");
        assert_eq!(rw(DistributeLeft, "( *sv ( -s s01 s02 ) v03 )").unwrap(), "( -v ( *sv s01 v03 ) ( *sv s02 v03 ) )");
        assert_eq!(
            rw(DistributeRight, "( *sv s01 ( +v v02 v03 ) )").unwrap(),
            "( +v ( *sv s01 v02 ) ( *sv s01 v03 ) )"
        );
        assert_eq!(rw(FactorLeft, "( -s ( *s s01 s02 ) ( *s s01 s03 ) )").unwrap(), "( *s s01 ( -s s02 s03 ) )");
        assert_eq!(rw(FactorRight, "( +v ( *sv s01 v03 ) ( *sv s02 v03 ) )").unwrap(), "( *sv ( +s s01 s02 ) v03 )");
        assert_eq!(rw(FactorRight, "( -s ( *s s01 s02 ) ( *s s01 s03 ) )"), None);
        assert_eq!(rw(AssociativeRight, "( /s ( *s s01 s02 ) s03 )").unwrap(), "( *s s01 ( /s s02 s03 ) )");
        assert_eq!(rw(AssociativeLeft, "( *sv s01 ( *sv s02 v03 ) )").unwrap(), "( *sv ( *s s01 s02 ) v03 )");
        assert_eq!(rw(AssociativeLeft, "( -s s01 ( -s s02 s03 ) )"), None);
        assert_eq!(rw(FlipLeft, "( ns ( -s s01 s02 ) )").unwrap(), "( -s s02 s01 )");
        assert_eq!(rw(FlipRight, "( /s s01 ( /s s02 s03 ) )").unwrap(), "( *s s01 ( /s s03 s02 ) )");
    }

    #[test]
    fn inverse_pairs_round_trip() {
        use RuleName::*;
        let cases = [
            (DistributeLeft, FactorRight, "( *s ( +s s01 s02 ) s03 )"),
            (DistributeLeft, FactorRight, "( /s ( -s s01 s02 ) s03 )"),
            (DistributeRight, FactorLeft, "( *s s01 ( -s s02 s03 ) )"),
            (DistributeRight, FactorLeft, "( *sv s01 ( -v v02 v03 ) )"),
            (AssociativeRight, AssociativeLeft, "( *s ( *s s01 s02 ) s03 )"),
            (AssociativeRight, AssociativeLeft, "( /s ( *s s01 s02 ) s03 )"),
            (AssociativeRight, AssociativeLeft, "( *sv ( *s s01 s02 ) v03 )"),
            (AssociativeRight, AssociativeLeft, "( +v ( +v v01 v02 ) v03 )"),
        ];
        for (fwd, back, text) in cases {
            let e = rhs(text);
            let mid = rewrite_node(fwd, &e).unwrap();
            assert_eq!(rewrite_node(back, &mid).unwrap(), e, "{fwd} then {back} on {text}");
        }
    }
}
