//! Checking a proposed rewrite sequence against a target program.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::lang::{parse_prefix_with, Limits, ParseError, Program};
use crate::rewrite::{ApplyError, RewriteRule, Rewriter, RuleParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum VerifyStatus {
    Proven,
    /// Step `index` (0-based) could not be applied.
    FailedStep {
        index: usize,
        reason: ApplyError,
    },
    /// Every step applied but the final program differs from the target.
    Mismatch,
}

impl fmt::Display for VerifyStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyStatus::Proven => f.write_str("proven"),
            VerifyStatus::FailedStep { index, reason } => write!(f, "step {} failed: {}", index + 1, reason),
            VerifyStatus::Mismatch => f.write_str("final program does not match the target"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyResult {
    pub status: VerifyStatus,
    /// Programs after each successful step, when tracing was requested.
    pub intermediates: Vec<Program>,
}

impl VerifyResult {
    pub fn is_proven(&self) -> bool {
        self.status == VerifyStatus::Proven
    }
}

/// Folds `seq` over `a` and compares the result with `b` token for token.
pub fn verify_with(rw: &Rewriter, a: &Program, b: &Program, seq: &[RewriteRule], trace: bool) -> VerifyResult {
    let mut intermediates = Vec::new();
    let mut cur = a.clone();
    for (index, rule) in seq.iter().enumerate() {
        match rw.apply(rule, &cur) {
            Ok(next) => {
                if trace {
                    intermediates.push(next.clone());
                }
                cur = next;
            }
            Err(reason) => return VerifyResult { status: VerifyStatus::FailedStep { index, reason }, intermediates },
        }
    }
    let status = if cur.to_prefix() == b.to_prefix() { VerifyStatus::Proven } else { VerifyStatus::Mismatch };
    VerifyResult { status, intermediates }
}

/// Verifies under the default limits without keeping intermediates.
pub fn verify(a: &Program, b: &Program, seq: &[RewriteRule]) -> VerifyResult {
    verify_with(&Rewriter::default(), a, b, seq, false)
}

#[derive(Debug, thiserror::Error)]
pub enum ProofFileError {
    #[error("line {line}: {msg}")]
    Header { line: usize, msg: &'static str },
    #[error("line {line}: {source}")]
    Program { line: usize, source: ParseError },
    #[error("line {line}: {source}")]
    Rule { line: usize, source: RuleParseError },
}

/// A proof file: `A: <tokens>`, `B: <tokens>`, then one rule per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofFile {
    pub a: Program,
    pub b: Program,
    pub rules: Vec<RewriteRule>,
}

impl ProofFile {
    pub fn parse(text: &str, limits: &Limits) -> Result<ProofFile, ProofFileError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut header = |tag: &str, msg: &'static str| -> Result<Program, ProofFileError> {
            let (line, l) = lines.next().ok_or(ProofFileError::Header { line: 0, msg })?;
            let body = l.strip_prefix(tag).ok_or(ProofFileError::Header { line, msg })?;
            parse_prefix_with(body, limits).map_err(|source| ProofFileError::Program { line, source })
        };
        let a = header("A:", "expected `A: <program>`")?;
        let b = header("B:", "expected `B: <program>`")?;
        let rules = lines
            .map(|(line, l)| l.parse().map_err(|source| ProofFileError::Rule { line, source }))
            .collect::<Result<_, _>>()?;
        Ok(ProofFile { a, b, rules })
    }

    pub fn render(&self) -> String {
        let mut out = format!("A: {}\nB: {}\n", self.a.to_prefix(), self.b.to_prefix());
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_prefix;

    fn rules(text: &[&str]) -> Vec<RewriteRule> {
        text.iter().map(|r| r.parse().unwrap()).collect()
    }

    #[test]
    fn reflexive_and_mismatch() {
        let p = parse_prefix("s01 === ( +s s02 s03 ) ;").unwrap();
        assert!(verify(&p, &p, &[]).is_proven());
        let q = parse_prefix("s01 === ( +s s03 s02 ) ;").unwrap();
        assert_eq!(verify(&p, &q, &[]).status, VerifyStatus::Mismatch);
        assert!(verify(&p, &q, &rules(&["stm1 Commute N"])).is_proven());
    }

    #[test]
    fn reports_failing_step() {
        let p = parse_prefix("s01 === ( +s s02 s03 ) ;").unwrap();
        let r = verify_with(
            &Rewriter::default(),
            &p,
            &p,
            &rules(&["stm1 Commute N", "stm1 Cancel N", "stm1 Commute N"]),
            true,
        );
        assert_eq!(r.status, VerifyStatus::FailedStep { index: 1, reason: ApplyError::IllegalPattern });
        assert_eq!(r.intermediates.len(), 1);
    }

    #[test]
    fn proof_file_round_trip() {
        let text = "A: s01 === ( +s s02 s03 ) ;\nB: s01 === ( +s s03 s02 ) ;\nstm1 Commute N\n";
        let f = ProofFile::parse(text, &Limits::default()).unwrap();
        assert_eq!(f.render(), text);
        assert!(verify(&f.a, &f.b, &f.rules).is_proven());
        assert!(ProofFile::parse("B: s01 === s02 ;", &Limits::default()).is_err());
    }
}
