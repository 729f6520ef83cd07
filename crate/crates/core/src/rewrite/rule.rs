use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::lang::{NodePath, VarId};

/// Highest statement number a rule can address.
pub const MAX_STM: usize = 20;

macro_rules! rule_names {
    ($($name:ident),* $(,)?) => {
        /// The 23 rewrite rule names, in canonical enumeration order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum RuleName {
            $($name),*
        }

        impl RuleName {
            pub const ALL: [RuleName; 23] = [$(RuleName::$name),*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(RuleName::$name => stringify!($name)),*
                }
            }
        }

        impl FromStr for RuleName {
            type Err = RuleParseError;

            fn from_str(s: &str) -> Result<RuleName, RuleParseError> {
                match s {
                    $(stringify!($name) => Ok(RuleName::$name),)*
                    _ => Err(RuleParseError::UnknownRule(s.to_string())),
                }
            }
        }
    };
}

rule_names! {
    SwapPrev,
    UseVar,
    DeleteStm,
    Inline,
    NewTmp,
    Rename,
    AddZero,
    SubZero,
    MultOne,
    DivOne,
    Cancel,
    NeutralOp,
    DoubleOp,
    AbsorbOp,
    Commute,
    DistributeLeft,
    DistributeRight,
    FactorLeft,
    FactorRight,
    AssociativeLeft,
    AssociativeRight,
    FlipLeft,
    FlipRight,
}

impl RuleName {
    pub fn takes_node(self) -> bool {
        !matches!(
            self,
            RuleName::SwapPrev | RuleName::UseVar | RuleName::DeleteStm | RuleName::Inline | RuleName::Rename
        )
    }

    pub fn takes_var(self) -> bool {
        matches!(self, RuleName::UseVar | RuleName::Inline | RuleName::NewTmp | RuleName::Rename)
    }

    /// Rules that act on whole statements rather than on one expression node.
    pub fn is_statement_rule(self) -> bool {
        self.takes_var() || matches!(self, RuleName::SwapPrev | RuleName::DeleteStm)
    }

    pub fn node_rules() -> impl Iterator<Item = RuleName> {
        RuleName::ALL.into_iter().filter(|r| !r.is_statement_rule())
    }
}

impl Serialize for RuleName {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RuleName {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RuleParseError {
    #[error("empty rule")]
    Empty,
    #[error("bad statement token `{0}` (expected stm1..stm20)")]
    BadStatement(String),
    #[error("missing rule name")]
    MissingName,
    #[error("unknown rule name `{0}`")]
    UnknownRule(String),
    #[error("`{rule}` requires {what}")]
    Missing { rule: RuleName, what: &'static str },
    #[error("unexpected operand `{found}` for `{rule}`")]
    Extra { rule: RuleName, found: String },
    #[error("bad operand `{0}`")]
    BadOperand(String),
}

/// One rewrite command: `stm# RuleName [NodeID] [VarID]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RewriteRule {
    /// 1-based statement number.
    pub stm: usize,
    pub name: RuleName,
    pub path: Option<NodePath>,
    pub var: Option<VarId>,
}

impl RewriteRule {
    /// Builds a rule, rejecting operand lists that do not match the name's
    /// signature.
    pub fn new(
        stm: usize,
        name: RuleName,
        path: Option<NodePath>,
        var: Option<VarId>,
    ) -> Result<RewriteRule, RuleParseError> {
        if !(1..=MAX_STM).contains(&stm) {
            return Err(RuleParseError::BadStatement(format!("stm{stm}")));
        }
        match (name.takes_node(), path) {
            (true, None) => return Err(RuleParseError::Missing { rule: name, what: "a NodeID" }),
            (false, Some(p)) => return Err(RuleParseError::Extra { rule: name, found: p.to_string() }),
            _ => {}
        }
        match (name.takes_var(), var) {
            (true, None) => return Err(RuleParseError::Missing { rule: name, what: "a VarID" }),
            (false, Some(v)) => return Err(RuleParseError::Extra { rule: name, found: v.to_string() }),
            _ => {}
        }
        Ok(RewriteRule { stm, name, path, var })
    }

    pub fn stmt(stm: usize, name: RuleName) -> RewriteRule {
        RewriteRule::new(stm, name, None, None).expect("statement rule without operands")
    }

    pub fn node(stm: usize, name: RuleName, path: NodePath) -> RewriteRule {
        RewriteRule::new(stm, name, Some(path), None).expect("node rule")
    }

    pub fn with_var(stm: usize, name: RuleName, var: VarId) -> RewriteRule {
        RewriteRule::new(stm, name, None, Some(var)).expect("variable rule")
    }

    pub fn new_tmp(stm: usize, path: NodePath, var: VarId) -> RewriteRule {
        RewriteRule::new(stm, RuleName::NewTmp, Some(path), Some(var)).expect("NewTmp rule")
    }

    /// Whitespace-separated output tokens.
    pub fn tokens(&self) -> Vec<String> {
        let mut out = vec![format!("stm{}", self.stm), self.name.to_string()];
        out.extend(self.path.map(|p| p.to_string()));
        out.extend(self.var.map(|v| v.to_string()));
        out
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stm{} {}", self.stm, self.name)?;
        if let Some(p) = self.path {
            write!(f, " {p}")?;
        }
        if let Some(v) = self.var {
            write!(f, " {v}")?;
        }
        Ok(())
    }
}

impl FromStr for RewriteRule {
    type Err = RuleParseError;

    fn from_str(text: &str) -> Result<RewriteRule, RuleParseError> {
        let mut toks = text.split_whitespace();
        let stm_tok = toks.next().ok_or(RuleParseError::Empty)?;
        let stm = stm_tok
            .strip_prefix("stm")
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()) && !d.starts_with('0'))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|n| (1..=MAX_STM).contains(n))
            .ok_or_else(|| RuleParseError::BadStatement(stm_tok.to_string()))?;
        let name: RuleName = toks.next().ok_or(RuleParseError::MissingName)?.parse()?;
        let mut path = None;
        let mut var = None;
        for tok in toks {
            if path.is_none() && var.is_none() && tok.starts_with('N') {
                if !name.takes_node() {
                    return Err(RuleParseError::Extra { rule: name, found: tok.to_string() });
                }
                path = Some(tok.parse().map_err(|_| RuleParseError::BadOperand(tok.to_string()))?);
            } else if var.is_none() {
                if !name.takes_var() {
                    return Err(RuleParseError::Extra { rule: name, found: tok.to_string() });
                }
                var = Some(tok.parse().map_err(|_| RuleParseError::BadOperand(tok.to_string()))?);
            } else {
                return Err(RuleParseError::Extra { rule: name, found: tok.to_string() });
            }
        }
        RewriteRule::new(stm, name, path, var)
    }
}

pub fn parse_rule(text: &str) -> Result<RewriteRule, RuleParseError> {
    text.parse()
}

pub fn print_rule(rule: &RewriteRule) -> String {
    rule.to_string()
}

impl Serialize for RewriteRule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RewriteRule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
