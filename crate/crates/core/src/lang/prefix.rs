//! The prefix token format: `s01 === ( +s s02 s03 ) ;`, one program per line.

use super::expr::Expr;
use super::limits::{LimitViolation, Limits};
use super::program::{Program, ProgramError, Stmt};
use super::token::{BinOp, Const, Func, UnOp, VarId};

/// Separator between the two programs of a pair.
pub const PAIR_SEPARATOR: &str = "Y";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("unbalanced parentheses")]
    Unbalanced,
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("`{op}` takes {expected} operand(s), found {found}")]
    Arity { op: String, expected: usize, found: usize },
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("limit violation: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Limits(Vec<LimitViolation>),
    #[error("expected exactly one `Y` separating two programs")]
    PairSeparator,
}

/// Splits on whitespace, detaching parentheses glued to neighbouring tokens.
pub fn tokenize(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    for word in text.split_whitespace() {
        let mut rest = word;
        while !rest.is_empty() {
            if let Some(stripped) = rest.strip_prefix(['(', ')']) {
                out.push(&rest[..1]);
                rest = stripped;
                continue;
            }
            let end = rest.find(['(', ')']).unwrap_or(rest.len());
            out.push(&rest[..end]);
            rest = &rest[end..];
        }
    }
    out
}

struct Parser<'a> {
    toks: Vec<&'a str>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self, expected: &'static str) -> Result<&'a str, ParseError> {
        let t = self.peek().ok_or(ParseError::Unexpected { expected, found: "end of input".into() })?;
        self.pos += 1;
        Ok(t)
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let t = self.next("assignment target")?;
        let target: VarId = t.parse().map_err(|_| unknown_or_unexpected(t, "assignment target"))?;
        let is_output = match self.next("`=` or `===`")? {
            "=" => false,
            "===" => true,
            other => return Err(ParseError::Unexpected { expected: "`=` or `===`", found: other.into() }),
        };
        let rhs = self.expr()?;
        match self.next("`;`")? {
            ";" => Ok(Stmt { target, is_output, rhs }),
            other => Err(ParseError::Unexpected { expected: "`;`", found: other.into() }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let t = self.next("expression")?;
        if t != "(" {
            if let Ok(v) = t.parse::<VarId>() {
                return Ok(Expr::Var(v));
            }
            if let Some(c) = Const::from_token(t) {
                return Ok(Expr::Const(c));
            }
            return Err(unknown_or_unexpected(t, "expression"));
        }
        let op = self.next("operator")?;
        let mut args = Vec::new();
        while self.peek() != Some(")") {
            if self.peek().is_none() {
                return Err(ParseError::Unbalanced);
            }
            args.push(self.expr()?);
        }
        self.pos += 1;
        let arity = |expected: usize| -> Result<(), ParseError> {
            if args.len() == expected {
                Ok(())
            } else {
                Err(ParseError::Arity { op: op.to_string(), expected, found: args.len() })
            }
        };
        if let Some(u) = UnOp::from_token(op) {
            arity(1)?;
            return Ok(Expr::unary(u, args.pop().unwrap()));
        }
        if let Some(b) = BinOp::from_token(op) {
            arity(2)?;
            let r = args.pop().unwrap();
            let l = args.pop().unwrap();
            return Ok(Expr::binary(b, l, r));
        }
        if let Ok(f) = op.parse::<Func>() {
            arity(f.arity())?;
            return Ok(Expr::Call(f, args));
        }
        Err(unknown_or_unexpected(op, "operator"))
    }
}

const KNOWN_PUNCT: [&str; 5] = ["(", ")", ";", "=", "==="];

fn unknown_or_unexpected(tok: &str, expected: &'static str) -> ParseError {
    let known = KNOWN_PUNCT.contains(&tok)
        || tok.parse::<VarId>().is_ok()
        || Const::from_token(tok).is_some()
        || UnOp::from_token(tok).is_some()
        || BinOp::from_token(tok).is_some()
        || tok.parse::<Func>().is_ok();
    if known {
        ParseError::Unexpected { expected, found: tok.to_string() }
    } else {
        ParseError::UnknownToken(tok.to_string())
    }
}

fn check_balance(toks: &[&str]) -> Result<(), ParseError> {
    let mut depth: i64 = 0;
    for t in toks {
        match *t {
            "(" => depth += 1,
            ")" => {
                depth -= 1;
                if depth < 0 {
                    return Err(ParseError::Unbalanced);
                }
            }
            _ => {}
        }
    }
    if depth == 0 {
        Ok(())
    } else {
        Err(ParseError::Unbalanced)
    }
}

/// Parses and checks against the default limits.
pub fn parse_prefix(text: &str) -> Result<Program, ParseError> {
    parse_prefix_with(text, &Limits::default())
}

pub fn parse_prefix_with(text: &str, limits: &Limits) -> Result<Program, ParseError> {
    let toks = tokenize(text);
    check_balance(&toks)?;
    let mut parser = Parser { toks, pos: 0 };
    let mut stmts = Vec::new();
    while parser.peek().is_some() {
        stmts.push(parser.stmt()?);
    }
    let program = Program::new(stmts)?;
    let violations = limits.check(&program);
    if !violations.is_empty() {
        return Err(ParseError::Limits(violations));
    }
    Ok(program)
}

pub fn print_prefix(p: &Program) -> String {
    p.to_prefix()
}

/// Splits `ProgA Y ProgB` and parses both halves.
pub fn parse_pair(text: &str, limits: &Limits) -> Result<(Program, Program), ParseError> {
    let mut halves = text.split_whitespace().collect::<Vec<_>>();
    let sep = halves.iter().position(|t| *t == PAIR_SEPARATOR);
    let Some(sep) = sep else {
        return Err(ParseError::PairSeparator);
    };
    let b = halves.split_off(sep + 1);
    halves.pop();
    if b.contains(&PAIR_SEPARATOR) {
        return Err(ParseError::PairSeparator);
    }
    Ok((parse_prefix_with(&halves.join(" "), limits)?, parse_prefix_with(&b.join(" "), limits)?))
}

pub fn print_pair(a: &Program, b: &Program) -> String {
    format!("{} {} {}", a.to_prefix(), PAIR_SEPARATOR, b.to_prefix())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_program() {
        let p = parse_prefix("s01 === ( +s s02 s03 ) ;").unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.outputs(), vec![VarId::scalar(1)]);
        assert_eq!(p.to_prefix(), "s01 === ( +s s02 s03 ) ;");
    }

    #[test]
    fn accepts_glued_parentheses_and_normalizes_spacing() {
        let p = parse_prefix("s25 = (/s s26 ( *s s27 s28 ) ) ;").unwrap();
        assert!(matches!(&p.stmts()[0].rhs, Expr::Binary(BinOp::DivS, _, _)));
        assert_eq!(p.to_prefix(), "s25 = ( /s s26 ( *s s27 s28 ) ) ;");
    }

    #[test]
    fn malformed_inputs() {
        assert_eq!(parse_prefix("s01 = ( +s s02 ;"), Err(ParseError::Unbalanced));
        assert_eq!(parse_prefix("s01 = ( +s s02 s03 ) ) ( ;"), Err(ParseError::Unbalanced));
        assert!(matches!(parse_prefix("s01 = ( +q s02 s03 ) ;"), Err(ParseError::UnknownToken(_))));
        assert!(matches!(parse_prefix("s01 = ( +s s02 ) ;"), Err(ParseError::Arity { .. })));
        assert!(matches!(parse_prefix("s01 = ( +s s02 v01 ) ;"), Err(ParseError::Program(_))));
        assert!(matches!(parse_prefix("s01 = s02"), Err(ParseError::Unexpected { .. })));
        assert!(matches!(parse_prefix(""), Err(ParseError::Program(ProgramError::Empty))));
    }

    #[test]
    fn statement_limit() {
        let text: Vec<String> = (1..=21).map(|i| format!("s{:02} = s30 ;", i)).collect();
        match parse_prefix(&text.join(" ")) {
            Err(ParseError::Limits(v)) => assert_eq!(v[0].actual, 21),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_prefix_with(&text.join(" "), &Limits::unbounded()).is_err());
    }

    #[test]
    fn pair_round_trip() {
        let line = "s01 === ( +s s02 s03 ) ; Y s01 === ( +s s03 s02 ) ;";
        let (a, b) = parse_pair(line, &Limits::default()).unwrap();
        assert_eq!(print_pair(&a, &b), line);
        assert!(parse_pair("s01 === s02 ;", &Limits::default()).is_err());
    }
}
