use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datagen::{derive_seed, Provenance, Sample};
use crate::lang::{Limits, Program};
use crate::rewrite::{RewriteRule, Rewriter};
use crate::search::{prove, Policy, ProofResult, SearchConfig};
use crate::verify::verify_with;

use super::export::Criterion;
use super::{RareTokens, StepSample, TokenFreqs};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    /// Intermediates kept by the narrow search.
    pub easy_width: usize,
    /// Intermediates kept by the wide search.
    pub hard_width: usize,
    pub beam: usize,
    pub max_steps: usize,
    /// Minimum improvement, in steps, of the wide proof over the narrow one.
    pub shorter_by: usize,
    /// Hard-proof length at which a shorter proof is always admitted; shorter
    /// proofs are admitted with probability `length / full_inclusion_length`.
    pub full_inclusion_length: f64,
    /// Fraction of the rarity vocabulary treated as rare.
    pub rare_fraction: f64,
    pub limits: Limits,
    /// Keep every legal expansion so failed searches can be mined.
    pub record_traces: bool,
    pub seed: u64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            easy_width: 2,
            hard_width: 20,
            beam: 5,
            max_steps: 25,
            shorter_by: 2,
            full_inclusion_length: 20.0,
            rare_fraction: 0.02,
            limits: Limits::default(),
            record_traces: false,
            seed: 0,
        }
    }
}

impl SelectionConfig {
    pub fn search_config(&self, width: usize) -> SearchConfig {
        SearchConfig {
            beam: self.beam,
            intermediates: width,
            max_steps: self.max_steps,
            enforce_limits: true,
            limits: self.limits,
            trace: self.record_traces,
        }
    }

    pub fn inclusion_probability(&self, hard_length: usize) -> f64 {
        (hard_length as f64 / self.full_inclusion_length).min(1.0)
    }
}

/// The outcome of one search over a known-equivalent pair, as written by
/// the `prove` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    pub id: String,
    pub prog_a: Program,
    pub prog_b: Program,
    pub result: Result<ProofResult, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcomePair {
    pub sample_id: String,
    pub prog_a: Program,
    pub prog_b: Program,
    pub easy: Result<ProofResult, String>,
    pub hard: Result<ProofResult, String>,
}

impl SearchOutcomePair {
    /// Pairs records by id, keeping the order of `easy`. Ids missing from
    /// either side are returned separately.
    pub fn join(easy: Vec<SearchRecord>, hard: Vec<SearchRecord>) -> (Vec<SearchOutcomePair>, Vec<String>) {
        let mut hard: BTreeMap<String, SearchRecord> = hard.into_iter().map(|r| (r.id.clone(), r)).collect();
        let mut pairs = Vec::new();
        let mut unmatched = Vec::new();
        for e in easy {
            match hard.remove(&e.id) {
                Some(h) => pairs.push(SearchOutcomePair {
                    sample_id: e.id,
                    prog_a: e.prog_a,
                    prog_b: e.prog_b,
                    easy: e.result,
                    hard: h.result,
                }),
                None => unmatched.push(e.id),
            }
        }
        unmatched.extend(hard.into_keys());
        (pairs, unmatched)
    }

    fn easy_proof(&self) -> Option<&[RewriteRule]> {
        self.easy.as_ref().ok().and_then(ProofResult::proof)
    }

    fn hard_proof(&self) -> Option<&[RewriteRule]> {
        self.hard.as_ref().ok().and_then(ProofResult::proof)
    }
}

/// Proves every sample with the narrow and the wide search under the same
/// policy, beam and step limit. Search errors are recorded per sample.
pub fn run_easy_hard(samples: &[Sample], policy: &dyn Policy, cfg: &SelectionConfig) -> Vec<SearchOutcomePair> {
    let easy_cfg = cfg.search_config(cfg.easy_width);
    let hard_cfg = cfg.search_config(cfg.hard_width);
    samples
        .par_iter()
        .map(|s| {
            let run = |c: &SearchConfig| prove(&s.prog_a, &s.prog_b, policy, c).map_err(|e| e.to_string());
            SearchOutcomePair {
                sample_id: s.id.clone(),
                prog_a: s.prog_a.clone(),
                prog_b: s.prog_b.clone(),
                easy: run(&easy_cfg),
                hard: run(&hard_cfg),
            }
        })
        .collect()
}

/// A newly selected training pair and the reasons it was chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selected {
    pub sample: Sample,
    pub criteria: Vec<Criterion>,
}

fn sample_rng(seed: u64, id: &str) -> ChaCha8Rng {
    let h = id.bytes().fold(0xcbf2_9ce4_8422_2325_u64, |h, b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3));
    ChaCha8Rng::seed_from_u64(derive_seed(seed, h))
}

/// Picks the wide-search proofs worth training on: those the narrow search
/// missed, those clearly shorter than the narrow proof (admitted at random
/// by length), and those using rare tokens. Every kept proof is re-verified
/// and duplicate pairs are dropped.
pub fn select(outcomes: &[SearchOutcomePair], freqs: &TokenFreqs, cfg: &SelectionConfig) -> Vec<Selected> {
    let rare = RareTokens::from_freqs(freqs, cfg.rare_fraction);
    let rw = Rewriter::new(cfg.limits);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for o in outcomes {
        let Some(hard) = o.hard_proof() else { continue };
        let mut criteria = Vec::new();
        match o.easy_proof() {
            None => criteria.push(Criterion::HardOnly),
            Some(easy) if hard.len() + cfg.shorter_by <= easy.len() => {
                let p = cfg.inclusion_probability(hard.len());
                if sample_rng(cfg.seed, &o.sample_id).gen_bool(p.clamp(0.0, 1.0)) {
                    criteria.push(Criterion::ShorterProof);
                }
            }
            Some(_) => {}
        }
        if hard.iter().any(|r| rare.in_rule(r)) {
            criteria.push(Criterion::RareTokens);
        }
        if criteria.is_empty() {
            continue;
        }
        if !verify_with(&rw, &o.prog_a, &o.prog_b, hard, false).is_proven() {
            log::warn!("dropping unverifiable proof for {}", o.sample_id);
            continue;
        }
        if !seen.insert((o.prog_a.to_prefix(), o.prog_b.to_prefix())) {
            continue;
        }
        out.push(Selected {
            sample: Sample {
                id: o.sample_id.clone(),
                prog_a: o.prog_a.clone(),
                prog_b: o.prog_b.clone(),
                gen_seq: Some(hard.to_vec()),
                provenance: Provenance::Mined,
            },
            criteria,
        });
    }
    out
}

/// Single-step samples harvested from unsuccessful searches: every recorded
/// legal rewrite whose rule uses a rare token becomes `before Y after ->
/// rule`. Results are re-verified and deduplicated, in trace order.
pub fn hindsight<'a>(
    searches: impl IntoIterator<Item = &'a ProofResult>,
    freqs: &TokenFreqs,
    cfg: &SelectionConfig,
) -> Vec<StepSample> {
    let rare = RareTokens::from_freqs(freqs, cfg.rare_fraction);
    let rw = Rewriter::new(cfg.limits);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for result in searches {
        if result.is_found() {
            continue;
        }
        for step in &result.trace {
            if !rare.in_rule(&step.rule) || !cfg.limits.admits(&step.before) || !cfg.limits.admits(&step.after) {
                continue;
            }
            if !verify_with(&rw, &step.before, &step.after, &[step.rule], false).is_proven() {
                continue;
            }
            let s = StepSample::new(&step.before, &step.after, &step.rule);
            if seen.insert(s.clone()) {
                out.push(s);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_prefix;
    use crate::search::{ProofStatus, TraceStep};

    fn found(rules: &[&str]) -> Result<ProofResult, String> {
        Ok(ProofResult {
            status: ProofStatus::Found(rules.iter().map(|r| r.parse().unwrap()).collect()),
            states_expanded: 1,
            budget_exceeded: false,
            trace: Vec::new(),
        })
    }

    fn failed() -> Result<ProofResult, String> {
        Ok(ProofResult {
            status: ProofStatus::StepLimit,
            states_expanded: 25,
            budget_exceeded: false,
            trace: Vec::new(),
        })
    }

    fn commuted() -> (Program, Program) {
        (
            parse_prefix("s01 === ( +s s02 ( *s s03 s04 ) ) ;").unwrap(),
            parse_prefix("s01 === ( +s ( *s s04 s03 ) s02 ) ;").unwrap(),
        )
    }

    fn pair(id: &str, easy: Result<ProofResult, String>, hard: Result<ProofResult, String>) -> SearchOutcomePair {
        let (a, b) = commuted();
        SearchOutcomePair { sample_id: id.into(), prog_a: a, prog_b: b, easy, hard }
    }

    /// Frequencies under which nothing in the commuted fixture is rare.
    fn common() -> TokenFreqs {
        super::super::rarity_vocabulary()
            .into_iter()
            .map(|t| {
                let c = if t.len() == 5 && t.starts_with('N') { 1 } else { 100 };
                (t, c)
            })
            .collect()
    }

    #[test]
    fn hard_only_proofs_are_selected() {
        let o = pair("a", failed(), found(&["stm1 Commute N", "stm1 Commute Nl"]));
        let sel = select(&[o], &common(), &SelectionConfig::default());
        assert_eq!(sel.len(), 1);
        assert_eq!(sel[0].criteria, vec![Criterion::HardOnly]);
        assert_eq!(sel[0].sample.provenance, Provenance::Mined);
    }

    #[test]
    fn equal_proofs_without_rare_tokens_are_excluded() {
        let proof = ["stm1 Commute N", "stm1 Commute Nl"];
        let o = pair("a", found(&proof), found(&proof));
        assert!(select(&[o], &common(), &SelectionConfig::default()).is_empty());
    }

    #[test]
    fn rare_tokens_admit_otherwise_equal_proofs() {
        let proof = ["stm1 Commute N", "stm1 Commute Nl"];
        let o = pair("a", found(&proof), found(&proof));
        let mut freqs = common();
        freqs.insert("Nl".into(), 0);
        let sel = select(&[o], &freqs, &SelectionConfig::default());
        assert_eq!(sel[0].criteria, vec![Criterion::RareTokens]);
    }

    #[test]
    fn unverifiable_and_failed_hard_proofs_are_never_selected() {
        let bogus = pair("a", failed(), found(&["stm1 Commute N"]));
        let none = pair("b", failed(), failed());
        let err = pair("c", failed(), Err("transport".into()));
        assert!(select(&[bogus, none, err], &common(), &SelectionConfig::default()).is_empty());
    }

    #[test]
    fn hindsight_keeps_only_rare_legal_steps_of_failed_searches() {
        let (a, b) = commuted();
        let mid = parse_prefix("s01 === ( +s ( *s s03 s04 ) s02 ) ;").unwrap();
        let trace = vec![
            TraceStep { before: a.clone(), rule: "stm1 Commute N".parse().unwrap(), after: mid.clone() },
            TraceStep { before: mid.clone(), rule: "stm1 Commute Nl".parse().unwrap(), after: b.clone() },
        ];
        let result = ProofResult { status: ProofStatus::Exhausted, states_expanded: 2, budget_exceeded: false, trace };
        let mut freqs = common();
        assert!(hindsight([&result], &freqs, &SelectionConfig::default()).is_empty());
        freqs.insert("Nl".into(), 0);
        let h = hindsight([&result, &result], &freqs, &SelectionConfig::default());
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].tgt, "stm1 Commute Nl");
        let ok = ProofResult { status: ProofStatus::Found(Vec::new()), ..result };
        assert!(hindsight([&ok], &freqs, &SelectionConfig::default()).is_empty());
    }

    #[test]
    fn join_matches_by_id() {
        let (a, b) = commuted();
        let rec = |id: &str| SearchRecord { id: id.into(), prog_a: a.clone(), prog_b: b.clone(), result: failed() };
        let (pairs, missing) = SearchOutcomePair::join(vec![rec("x"), rec("y")], vec![rec("y"), rec("z")]);
        assert_eq!(pairs.len(), 1);
        assert_eq!(pairs[0].sample_id, "y");
        assert_eq!(missing, vec!["x".to_string(), "z".to_string()]);
    }
}
