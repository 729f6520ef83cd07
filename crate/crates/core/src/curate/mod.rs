//! Training data curation: step samples, token rarity, self-supervised
//! selection of new proofs, hindsight mining of failed searches, policy
//! evaluation reports and the line-file export consumed by model trainers.

pub mod eval;
pub mod export;
pub mod select;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::datagen::Sample;
use crate::lang::{print_pair, Limits, NodePath, Program};
use crate::rewrite::{ApplyError, RewriteRule, Rewriter, RuleName, MAX_STM};

pub use eval::{evaluate_policy, EvalCell, EvalReport, EvalRow, COLUMN_NAMES, ROW_NAMES};
pub use export::{Criterion, SampleMeta, TrainingSet};
pub use select::{hindsight, run_easy_hard, select, SearchOutcomePair, SearchRecord, Selected, SelectionConfig};

/// Counts of target-side tokens.
pub type TokenFreqs = BTreeMap<String, u64>;

/// One training record: the current program and the target, separated by
/// `Y`, mapped to the next rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StepSample {
    pub src: String,
    pub tgt: String,
}

impl StepSample {
    pub fn new(current: &Program, target: &Program, rule: &RewriteRule) -> StepSample {
        StepSample { src: print_pair(current, target), tgt: rule.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("sample {id}: step {} does not apply: {reason}", .index + 1)]
pub struct ExpandError {
    pub id: String,
    pub index: usize,
    pub reason: ApplyError,
}

/// One step sample per rule of each generation sequence: intermediate `i`
/// paired with ProgB maps to rule `i + 1`. Samples without a sequence
/// contribute nothing.
pub fn expand_steps(samples: &[Sample]) -> Result<Vec<StepSample>, ExpandError> {
    let rw = Rewriter::new(Limits::unbounded());
    let mut out = Vec::new();
    for s in samples {
        let Some(seq) = &s.gen_seq else { continue };
        let mut cur = s.prog_a.clone();
        for (index, rule) in seq.iter().enumerate() {
            out.push(StepSample::new(&cur, &s.prog_b, rule));
            cur = rw.apply(rule, &cur).map_err(|reason| ExpandError { id: s.id.clone(), index, reason })?;
        }
    }
    Ok(out)
}

pub fn token_frequencies(steps: &[StepSample]) -> TokenFreqs {
    let mut freqs = TokenFreqs::new();
    for s in steps {
        for tok in s.tgt.split_whitespace() {
            *freqs.entry(tok.to_string()).or_default() += 1;
        }
    }
    freqs
}

/// Tokens whose rarity is tracked: statement numbers, rule names and node
/// paths. Variable names are excluded because encoding randomizes them.
pub fn rarity_vocabulary() -> Vec<String> {
    let mut v: Vec<String> = (1..=MAX_STM).map(|k| format!("stm{k}")).collect();
    v.extend(RuleName::ALL.iter().map(|r| r.as_str().to_string()));
    v.extend(NodePath::all().into_iter().map(|p| p.to_string()));
    v
}

/// The least frequent part of the rarity vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RareTokens {
    tokens: BTreeSet<String>,
    cutoff: u64,
}

impl RareTokens {
    /// Marks the `fraction` least frequent vocabulary tokens as rare, plus
    /// every token tied with the last of them. Unseen tokens count as zero.
    pub fn from_freqs(freqs: &TokenFreqs, fraction: f64) -> RareTokens {
        let vocab = rarity_vocabulary();
        let mut counts: Vec<(u64, String)> =
            vocab.into_iter().map(|t| (freqs.get(&t).copied().unwrap_or(0), t)).collect();
        counts.sort();
        let take = (fraction * counts.len() as f64).ceil() as usize;
        if take == 0 {
            return RareTokens { tokens: BTreeSet::new(), cutoff: 0 };
        }
        let cutoff = counts[take.min(counts.len()) - 1].0;
        let tokens = counts.into_iter().take_while(|(c, _)| *c <= cutoff).map(|(_, t)| t).collect();
        RareTokens { tokens, cutoff }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(token)
    }

    pub fn in_rule(&self, rule: &RewriteRule) -> bool {
        rule.tokens().iter().any(|t| self.contains(t))
    }

    pub fn tokens(&self) -> &BTreeSet<String> {
        &self.tokens
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::Provenance;
    use crate::lang::parse_prefix;

    fn sample(a: &str, b: &str, seq: &[&str]) -> Sample {
        Sample {
            id: "t".into(),
            prog_a: parse_prefix(a).unwrap(),
            prog_b: parse_prefix(b).unwrap(),
            gen_seq: Some(seq.iter().map(|r| r.parse().unwrap()).collect()),
            provenance: Provenance::Synthetic,
        }
    }

    #[test]
    fn expansion_pairs_each_intermediate_with_the_target() {
        let s = sample(
            "s01 === ( +s ( *s s02 s03 ) s04 ) ;",
            "s01 === ( +s s04 ( *s s03 s02 ) ) ;",
            &["stm1 Commute N", "stm1 Commute Nr"],
        );
        let steps = expand_steps(&[s]).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[0].src, "s01 === ( +s ( *s s02 s03 ) s04 ) ; Y s01 === ( +s s04 ( *s s03 s02 ) ) ;");
        assert_eq!(steps[1].src, "s01 === ( +s s04 ( *s s02 s03 ) ) ; Y s01 === ( +s s04 ( *s s03 s02 ) ) ;");
        assert_eq!(steps[1].tgt, "stm1 Commute Nr");
    }

    #[test]
    fn zero_step_and_missing_sequences_expand_to_nothing() {
        let mut s = sample("s01 === s02 ;", "s01 === s02 ;", &[]);
        assert!(expand_steps(&[s.clone()]).unwrap().is_empty());
        s.gen_seq = None;
        assert!(expand_steps(&[s]).unwrap().is_empty());
    }

    #[test]
    fn broken_sequence_is_reported() {
        let s = sample("s01 === s02 ;", "s01 === s02 ;", &["stm1 Commute N"]);
        let err = expand_steps(&[s]).unwrap_err();
        assert_eq!(err.index, 0);
        assert_eq!(err.reason, ApplyError::IllegalPattern);
    }

    #[test]
    fn frequencies_count_target_tokens() {
        assert!(token_frequencies(&[]).is_empty());
        let steps = vec![
            StepSample { src: String::new(), tgt: "stm1 Commute Nrlrr".into() },
            StepSample { src: String::new(), tgt: "stm2 Rename v03".into() },
            StepSample { src: String::new(), tgt: "stm1 Commute N".into() },
        ];
        let f = token_frequencies(&steps);
        assert_eq!(f["stm1"], 2);
        assert_eq!(f["Commute"], 2);
        assert_eq!(f["Nrlrr"], 1);
        assert_eq!(f.values().sum::<u64>(), 9);
    }

    #[test]
    fn rarity_takes_the_bottom_fraction_with_ties() {
        let vocab = rarity_vocabulary();
        assert_eq!(vocab.len(), 20 + 23 + 31);
        let mut freqs: TokenFreqs = vocab.iter().map(|t| (t.clone(), 1000)).collect();
        freqs.insert("Nrlrr".into(), 278);
        freqs.insert("Nllll".into(), 300);
        freqs.insert("Nrrrr".into(), 300);
        let rare = RareTokens::from_freqs(&freqs, 0.02);
        assert_eq!(rare.cutoff(), 300);
        assert_eq!(rare.tokens().len(), 3);
        assert!(rare.contains("Nrlrr"));
        assert!(!rare.contains("Commute"));
        assert!(rare.in_rule(&"stm2 AssociativeLeft Nrrrr".parse().unwrap()));
        assert!(RareTokens::from_freqs(&freqs, 0.0).tokens().is_empty());
    }
}
