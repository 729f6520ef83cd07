use std::collections::BTreeMap;

use serde::Serialize;

use crate::rewrite::RuleName;

use super::Sample;

/// Summary of a corpus of pairs with known rewrite sequences.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStats {
    pub pairs: usize,
    pub with_sequence: usize,
    pub total_steps: usize,
    pub mean_steps: f64,
    pub max_steps: usize,
    pub max_nodes: usize,
    /// Number of sequences using each rule at least once.
    pub pairs_using: BTreeMap<RuleName, usize>,
    /// Total applications of each rule.
    pub rule_steps: BTreeMap<RuleName, usize>,
    /// Pairs by sequence length.
    pub length_histogram: BTreeMap<usize, usize>,
    /// First programs by statement count.
    pub statement_histogram: BTreeMap<usize, usize>,
    /// First programs by node count, in buckets of ten starting at the key.
    pub node_histogram: BTreeMap<usize, usize>,
}

impl CorpusStats {
    pub fn of(samples: &[Sample]) -> CorpusStats {
        let mut st = CorpusStats { pairs: samples.len(), ..CorpusStats::default() };
        for s in samples {
            st.max_nodes = st.max_nodes.max(s.prog_a.node_count()).max(s.prog_b.node_count());
            *st.statement_histogram.entry(s.prog_a.len()).or_default() += 1;
            *st.node_histogram.entry(s.prog_a.node_count() / 10 * 10).or_default() += 1;
            let Some(seq) = &s.gen_seq else {
                continue;
            };
            st.with_sequence += 1;
            st.total_steps += seq.len();
            st.max_steps = st.max_steps.max(seq.len());
            *st.length_histogram.entry(seq.len()).or_default() += 1;
            let mut seen = Vec::new();
            for r in seq {
                *st.rule_steps.entry(r.name).or_default() += 1;
                if !seen.contains(&r.name) {
                    seen.push(r.name);
                    *st.pairs_using.entry(r.name).or_default() += 1;
                }
            }
        }
        if st.with_sequence > 0 {
            st.mean_steps = st.total_steps as f64 / st.with_sequence as f64;
        }
        st
    }

    /// Fraction of sequenced pairs that use `rule`.
    pub fn usage(&self, rule: RuleName) -> f64 {
        if self.with_sequence == 0 {
            return 0.0;
        }
        self.pairs_using.get(&rule).copied().unwrap_or(0) as f64 / self.with_sequence as f64
    }

    pub fn missing_rules(&self) -> Vec<RuleName> {
        RuleName::ALL.into_iter().filter(|r| !self.pairs_using.contains_key(r)).collect()
    }
}
