use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::Sample;
use crate::rewrite::{RewriteRule, RuleName};
use crate::search::{prove, Policy, SearchConfig};

pub const ROW_NAMES: [&str; 8] = [
    "Whole dataset",
    "Rename",
    "Newtmp",
    "DistributeLeft",
    "No statement rules",
    "NodeID at depth 5",
    "Rewrite steps 1-10",
    "Rewrite steps 11+",
];

pub const COLUMN_NAMES: [&str; 4] = ["ALL", "Functions 3 or more", "Max depth 4-6", "Nodes 30-100"];

/// Row membership from the generation sequence. Rows other than the first
/// need a known sequence.
fn rows_of(seq: Option<&[RewriteRule]>) -> [bool; 8] {
    let Some(seq) = seq else {
        return [true, false, false, false, false, false, false, false];
    };
    let uses = |r: RuleName| seq.iter().any(|x| x.name == r);
    [
        true,
        uses(RuleName::Rename),
        uses(RuleName::NewTmp),
        uses(RuleName::DistributeLeft),
        !seq.iter().any(|x| x.name.is_statement_rule()),
        seq.iter().any(|x| x.path.is_some_and(|p| p.depth() == 5)),
        (1..=10).contains(&seq.len()),
        seq.len() >= 11,
    ]
}

/// Column membership from the first program of the pair.
fn columns_of(s: &Sample) -> [bool; 4] {
    let a = &s.prog_a;
    [true, a.call_count() >= 3, (4..=6).contains(&a.max_depth()), (30..=100).contains(&a.node_count())]
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCell {
    pub proven: usize,
    pub total: usize,
}

impl EvalCell {
    pub fn rate(&self) -> Option<f64> {
        (self.total > 0).then(|| self.proven as f64 / self.total as f64)
    }
}

impl fmt::Display for EvalCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rate() {
            Some(r) => write!(f, "{:.0}%({})", r * 100.0, self.total),
            None => write!(f, "-({})", self.total),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalRow {
    pub name: String,
    pub cells: [EvalCell; 4],
}

/// Success rates by sequence-derived subset (rows) and first-program shape
/// (columns).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
    /// Samples whose search ended in an error rather than a result.
    pub errors: usize,
}

impl EvalReport {
    pub fn row(&self, name: &str) -> Option<&EvalRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Tallies `(sample, proven)` outcomes.
    pub fn tally<'a>(outcomes: impl IntoIterator<Item = (&'a Sample, bool)>) -> EvalReport {
        let mut rows: Vec<EvalRow> =
            ROW_NAMES.iter().map(|n| EvalRow { name: n.to_string(), cells: [EvalCell::default(); 4] }).collect();
        for (s, proven) in outcomes {
            let rs = rows_of(s.gen_seq.as_deref());
            let cs = columns_of(s);
            for (row, _) in rows.iter_mut().zip(rs).filter(|(_, r)| *r) {
                for (cell, _) in row.cells.iter_mut().zip(cs).filter(|(_, c)| *c) {
                    cell.total += 1;
                    cell.proven += proven as usize;
                }
            }
        }
        EvalReport { rows, errors: 0 }
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let first = ROW_NAMES.iter().map(|n| n.len()).max().unwrap_or(0);
        write!(f, "{:first$}", "Rewrite Rules")?;
        for c in COLUMN_NAMES {
            write!(f, "  {c:>20}")?;
        }
        writeln!(f)?;
        for row in &self.rows {
            write!(f, "{:first$}", row.name)?;
            for cell in &row.cells {
                write!(f, "  {:>20}", cell.to_string())?;
            }
            writeln!(f)?;
        }
        if self.errors > 0 {
            writeln!(f, "search errors: {}", self.errors)?;
        }
        Ok(())
    }
}

/// Proves every sample and reports success rates by subset. A search error
/// counts as a failure.
pub fn evaluate_policy(samples: &[Sample], policy: &dyn Policy, cfg: &SearchConfig) -> EvalReport {
    let results: Vec<Option<bool>> =
        samples.par_iter().map(|s| prove(&s.prog_a, &s.prog_b, policy, cfg).ok().map(|r| r.is_found())).collect();
    let mut report = EvalReport::tally(samples.iter().zip(results.iter().map(|r| r.unwrap_or(false))));
    report.errors = results.iter().filter(|r| r.is_none()).count();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Provenance;
    use crate::lang::parse_prefix;

    fn sample_with(seq: Vec<RewriteRule>) -> Sample {
        let p = parse_prefix("s01 === ( +s s02 s03 ) ;").unwrap();
        Sample { id: "x".into(), prog_a: p.clone(), prog_b: p, gen_seq: Some(seq), provenance: Provenance::Synthetic }
    }

    #[test]
    fn twelve_step_sample_lands_in_the_long_row() {
        let seq = vec!["stm1 Commute N".parse().unwrap(); 12];
        let r = EvalReport::tally([(&sample_with(seq), true)]);
        assert_eq!(r.row("Rewrite steps 11+").unwrap().cells[0], EvalCell { proven: 1, total: 1 });
        assert_eq!(r.row("Rewrite steps 1-10").unwrap().cells[0].total, 0);
        assert_eq!(r.row("No statement rules").unwrap().cells[0].total, 1);
        assert_eq!(r.row("Whole dataset").unwrap().cells[3].total, 0);
    }

    #[test]
    fn rule_and_depth_rows() {
        let seq = vec![
            "stm1 Rename s09".parse().unwrap(),
            "stm1 Commute Nllrr".parse().unwrap(),
            "stm1 NewTmp Nl s10".parse().unwrap(),
        ];
        let r = EvalReport::tally([(&sample_with(seq), false)]);
        for name in ["Rename", "Newtmp", "NodeID at depth 5", "Rewrite steps 1-10"] {
            assert_eq!(r.row(name).unwrap().cells[0], EvalCell { proven: 0, total: 1 }, "{name}");
        }
        assert_eq!(r.row("No statement rules").unwrap().cells[0].total, 0);
        assert_eq!(r.row("DistributeLeft").unwrap().cells[0].total, 0);
    }

    #[test]
    fn empty_buckets_render_as_zero_counts() {
        let r = EvalReport::tally([]);
        let text = r.to_string();
        for name in ROW_NAMES {
            assert!(text.contains(name));
        }
        assert!(text.contains("-(0)"));
    }
}
