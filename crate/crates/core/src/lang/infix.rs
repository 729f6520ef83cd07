//! Ingestion of the normalized infix mini-language, e.g.
//! `t1 = i1 - i2 ; o1 = i2 / t1 ;`.
//!
//! Names come in three families: `i#` inputs, `t#` temporaries and `o#`
//! outputs. Types are inferred: results of `f#v`/`g#v` calls are vectors, and
//! inputs take whatever type their first use demands (scalar by default).

use std::collections::BTreeMap;

use super::encode::EncodeError;
use super::expr::Expr;
use super::limits::{LimitViolation, Limits};
use super::program::{Program, ProgramError, Stmt};
use super::token::{BinOp, Const, Func, TypeTag, UnOp, VarId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InfixError {
    #[error("syntax error at token {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("`{0}` is not an i#, t# or o# name")]
    BadName(String),
    #[error("input `{0}` cannot be assigned")]
    InputAssigned(String),
    #[error("`{0}` is read before it is assigned")]
    Undefined(String),
    #[error("`{0}` is read after its final assignment")]
    OutputReadAfter(String),
    #[error("`{func}` takes {expected} argument(s), found {found}")]
    Arity { func: String, expected: usize, found: usize },
    #[error("type mismatch at `{0}`")]
    Type(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("limit violation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Limits(Vec<LimitViolation>),
}

#[derive(Debug, Clone)]
enum Ast {
    Name(String),
    Num(u8),
    Neg(Box<Ast>),
    Bin(char, Box<Ast>, Box<Ast>),
    Call(Func, Vec<Ast>),
}

fn lex(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_whitespace() || "+-*/(),;=".contains(c) {
            if !cur.is_empty() {
                out.push(std::mem::take(&mut cur));
            }
            if !c.is_whitespace() {
                out.push(c.to_string());
            }
        } else {
            cur.push(c);
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct Parser {
    toks: Vec<String>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&str> {
        self.toks.get(self.pos).map(String::as_str)
    }

    fn err(&self, msg: impl Into<String>) -> InfixError {
        InfixError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn expect(&mut self, t: &str) -> Result<(), InfixError> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{t}`")))
        }
    }

    fn stmt(&mut self) -> Result<(String, Ast), InfixError> {
        let name = self.peek().ok_or_else(|| self.err("expected statement"))?.to_string();
        self.pos += 1;
        self.expect("=")?;
        let e = self.sum()?;
        self.expect(";")?;
        Ok((name, e))
    }

    fn sum(&mut self) -> Result<Ast, InfixError> {
        let mut lhs = self.product()?;
        while let Some(op @ ("+" | "-")) = self.peek() {
            let op = op.chars().next().unwrap();
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Ast, InfixError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ("*" | "/")) = self.peek() {
            let op = op.chars().next().unwrap();
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Ast::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Ast, InfixError> {
        if self.peek() == Some("-") {
            self.pos += 1;
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Ast, InfixError> {
        let t = self.peek().ok_or_else(|| self.err("unexpected end of input"))?.to_string();
        self.pos += 1;
        match t.as_str() {
            "(" => {
                let e = self.sum()?;
                self.expect(")")?;
                Ok(e)
            }
            "0" => Ok(Ast::Num(0)),
            "1" => Ok(Ast::Num(1)),
            _ => {
                if let Ok(f) = t.parse::<Func>() {
                    self.expect("(")?;
                    let mut args = Vec::new();
                    if self.peek() != Some(")") {
                        args.push(self.sum()?);
                        while self.peek() == Some(",") {
                            self.pos += 1;
                            args.push(self.sum()?);
                        }
                    }
                    self.expect(")")?;
                    if args.len() != f.arity() {
                        return Err(InfixError::Arity { func: t, expected: f.arity(), found: args.len() });
                    }
                    return Ok(Ast::Call(f, args));
                }
                if family(&t).is_some() {
                    Ok(Ast::Name(t))
                } else if t.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    Err(InfixError::BadName(t))
                } else {
                    Err(self.err(format!("unexpected `{t}`")))
                }
            }
        }
    }
}

fn family(name: &str) -> Option<char> {
    let mut chars = name.chars();
    let f = chars.next()?;
    let rest = chars.as_str();
    (matches!(f, 'i' | 't' | 'o') && !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())).then_some(f)
}

#[derive(Default)]
struct Typer {
    types: BTreeMap<String, TypeTag>,
}

impl Typer {
    fn mismatch(e: &Ast) -> InfixError {
        InfixError::Type(match e {
            Ast::Name(n) => n.clone(),
            Ast::Num(k) => k.to_string(),
            Ast::Neg(_) => "-".into(),
            Ast::Bin(op, _, _) => op.to_string(),
            Ast::Call(f, _) => f.to_string(),
        })
    }

    /// `None` means an input whose type is not yet constrained.
    fn synth(&mut self, e: &Ast) -> Result<Option<TypeTag>, InfixError> {
        match e {
            Ast::Name(n) => Ok(self.types.get(n).copied()),
            Ast::Num(0) => Ok(None),
            Ast::Num(_) => Ok(Some(TypeTag::Scalar)),
            Ast::Neg(a) => self.synth(a),
            Ast::Call(f, args) => {
                for (a, &ty) in args.iter().zip(f.params()) {
                    self.check(a, ty)?;
                }
                Ok(Some(f.result_ty()))
            }
            Ast::Bin('+' | '-', l, r) => {
                let (lt, rt) = (self.synth(l)?, self.synth(r)?);
                let ty = match (lt, rt) {
                    (Some(a), Some(b)) if a == b => a,
                    (Some(_), Some(_)) => return Err(Self::mismatch(e)),
                    (Some(a), None) => a,
                    (None, Some(b)) => b,
                    (None, None) => TypeTag::Scalar,
                };
                self.check(l, ty)?;
                self.check(r, ty)?;
                Ok(Some(ty))
            }
            Ast::Bin('*', l, r) => {
                self.check(l, TypeTag::Scalar)?;
                let rt = self.synth(r)?.unwrap_or(TypeTag::Scalar);
                self.check(r, rt)?;
                Ok(Some(rt))
            }
            Ast::Bin(_, l, r) => {
                self.check(l, TypeTag::Scalar)?;
                self.check(r, TypeTag::Scalar)?;
                Ok(Some(TypeTag::Scalar))
            }
        }
    }

    fn check(&mut self, e: &Ast, ty: TypeTag) -> Result<(), InfixError> {
        match e {
            Ast::Name(n) => {
                let t = *self.types.entry(n.clone()).or_insert(ty);
                if t != ty {
                    return Err(Self::mismatch(e));
                }
                Ok(())
            }
            Ast::Num(0) => Ok(()),
            Ast::Neg(a) => self.check(a, ty),
            Ast::Bin('+' | '-', l, r) => {
                self.check(l, ty)?;
                self.check(r, ty)
            }
            Ast::Bin('*', l, r) => {
                self.check(l, TypeTag::Scalar)?;
                self.check(r, ty)
            }
            _ => match self.synth(e)? {
                Some(t) if t == ty => Ok(()),
                _ => Err(Self::mismatch(e)),
            },
        }
    }
}

fn lower(e: &Ast, names: &BTreeMap<String, VarId>, want: TypeTag) -> Expr {
    match e {
        Ast::Name(n) => Expr::Var(names[n]),
        Ast::Num(0) => Expr::Const(Const::zero(want)),
        Ast::Num(_) => Expr::Const(Const::OneS),
        Ast::Neg(a) => Expr::unary(UnOp::neg(want), lower(a, names, want)),
        Ast::Call(f, args) => Expr::Call(*f, args.iter().zip(f.params()).map(|(a, &t)| lower(a, names, t)).collect()),
        Ast::Bin(op, l, r) => {
            let bin = match (op, want) {
                ('+', t) => BinOp::add(t),
                ('-', t) => BinOp::sub(t),
                ('*', TypeTag::Scalar) => BinOp::MulS,
                ('*', TypeTag::Vector) => BinOp::MulSV,
                _ => BinOp::DivS,
            };
            let (lt, rt, _) = bin.signature();
            Expr::binary(bin, lower(l, names, lt), lower(r, names, rt))
        }
    }
}

fn collect_names(e: &Ast, out: &mut Vec<String>) {
    match e {
        Ast::Name(n) => out.push(n.clone()),
        Ast::Num(_) => {}
        Ast::Neg(a) => collect_names(a, out),
        Ast::Bin(_, l, r) => {
            collect_names(l, out);
            collect_names(r, out);
        }
        Ast::Call(_, args) => args.iter().for_each(|a| collect_names(a, out)),
    }
}

/// Parses normalized source into a program whose variables are numbered in
/// order of first appearance (`s01, s02, ...` and `v01, ...`). The final
/// assignment of each `o#` name is marked as an output.
pub fn parse_normalized_source(text: &str) -> Result<Program, InfixError> {
    parse_normalized_source_with(text, &Limits::default())
}

pub fn parse_normalized_source_with(text: &str, limits: &Limits) -> Result<Program, InfixError> {
    let mut parser = Parser { toks: lex(text), pos: 0 };
    let mut stmts = Vec::new();
    while parser.peek().is_some() {
        stmts.push(parser.stmt()?);
    }
    if stmts.is_empty() {
        return Err(ProgramError::Empty.into());
    }

    // roles
    let mut assigned = std::collections::BTreeSet::new();
    let last_assign: BTreeMap<&str, usize> = stmts.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
    let mut order: Vec<String> = Vec::new();
    for (i, (target, rhs)) in stmts.iter().enumerate() {
        let mut reads = Vec::new();
        collect_names(rhs, &mut reads);
        for r in &reads {
            match family(r) {
                Some('i') => {}
                Some(_) if !assigned.contains(r) => return Err(InfixError::Undefined(r.clone())),
                Some('o') if last_assign[r.as_str()] < i => return Err(InfixError::OutputReadAfter(r.clone())),
                _ => {}
            }
        }
        match family(target) {
            None => return Err(InfixError::BadName(target.clone())),
            Some('i') => return Err(InfixError::InputAssigned(target.clone())),
            _ => {}
        }
        assigned.insert(target.clone());
        for n in reads.into_iter().chain(std::iter::once(target.clone())) {
            if !order.contains(&n) {
                order.push(n);
            }
        }
    }

    // types
    let mut typer = Typer::default();
    for (target, rhs) in &stmts {
        let ty = match typer.synth(rhs)? {
            Some(t) => t,
            None => {
                typer.check(rhs, TypeTag::Scalar)?;
                TypeTag::Scalar
            }
        };
        match typer.types.get(target) {
            Some(&t) if t != ty => return Err(InfixError::Type(target.clone())),
            _ => {
                typer.types.insert(target.clone(), ty);
            }
        }
    }

    // canonical token assignment
    let mut names = BTreeMap::new();
    let mut counters = [0usize; 2];
    for n in &order {
        let ty = typer.types.get(n).copied().unwrap_or(TypeTag::Scalar);
        let slot = usize::from(ty == TypeTag::Vector);
        counters[slot] += 1;
        let available = VarId::all_of(ty).count();
        let v = u8::try_from(counters[slot]).ok().and_then(|i| VarId::new(ty, i)).ok_or(EncodeError {
            ty,
            needed: order.iter().filter(|m| typer.types.get(*m).copied().unwrap_or(TypeTag::Scalar) == ty).count(),
            available,
        })?;
        names.insert(n.clone(), v);
    }

    let program_stmts = stmts
        .iter()
        .enumerate()
        .map(|(i, (target, rhs))| {
            let ty = typer.types[target];
            Stmt {
                target: names[target],
                is_output: family(target) == Some('o') && last_assign[target.as_str()] == i,
                rhs: lower(rhs, &names, ty),
            }
        })
        .collect();
    let program = Program::new(program_stmts)?;
    let violations = limits.check(&program);
    if !violations.is_empty() {
        return Err(InfixError::Limits(violations));
    }
    Ok(program)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalized_example() {
        let p = parse_normalized_source("t1 = i1 - i2 ; o1 = i2 / t1 ;").unwrap();
        assert_eq!(p.to_prefix(), "s03 = ( -s s01 s02 ) ; s04 === ( /s s02 s03 ) ;");
        assert!(!p.stmts()[0].is_output);
        assert!(p.stmts()[1].is_output);
    }

    #[test]
    fn identity_copy() {
        let p = parse_normalized_source("o1 = i1 ;").unwrap();
        assert_eq!(p.to_prefix(), "s02 === s01 ;");
    }

    #[test]
    fn vector_call_output() {
        let p = parse_normalized_source("o1 = f4v ( i1 , i2 ) ;").unwrap();
        assert_eq!(p.to_prefix(), "v01 === ( f4v s01 s02 ) ;");
    }

    #[test]
    fn vector_inputs_are_inferred() {
        let p = parse_normalized_source("t1 = i1 * ( i2 + g1v ( i3 , i4 ) ) ; o1 = g2s ( t1 - i2 ) ;").unwrap();
        assert_eq!(p.to_prefix(), "v04 = ( *sv s01 ( +v v01 ( g1v v02 v03 ) ) ) ; s02 === ( g2s ( -v v04 v01 ) ) ;");
    }

    #[test]
    fn rejects_bad_names_and_arity() {
        assert!(matches!(parse_normalized_source("x1 = i1 ;"), Err(InfixError::BadName(_))));
        assert!(matches!(parse_normalized_source("i1 = i2 ;"), Err(InfixError::InputAssigned(_))));
        assert!(matches!(parse_normalized_source("o1 = f1s ( i1 ) ;"), Err(InfixError::Arity { .. })));
        assert!(matches!(parse_normalized_source("o1 = t1 ;"), Err(InfixError::Undefined(_))));
        assert!(matches!(parse_normalized_source("o1 = i1 ; o2 = o1 ;"), Err(InfixError::OutputReadAfter(_))));
    }

    #[test]
    fn reassigned_output_is_flagged_only_at_its_last_assignment() {
        let p = parse_normalized_source("o1 = i1 * i2 ; o1 = o1 + i1 ;").unwrap();
        assert_eq!(p.to_prefix(), "s03 = ( *s s01 s02 ) ; s03 === ( +s s03 s01 ) ;");
    }
}
