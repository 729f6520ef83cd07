use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datagen::{Provenance, Sample};

use super::select::Selected;
use super::{expand_steps, ExpandError, StepSample};

/// Why a sample entered the training set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Generated pair with its generation sequence.
    Generated,
    /// Proven only by the wide search.
    HardOnly,
    /// The wide proof is clearly shorter than the narrow one.
    ShorterProof,
    /// The proof uses rare output tokens.
    RareTokens,
    /// A rare-token step harvested from a failed search.
    Hindsight,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleMeta {
    pub id: String,
    pub provenance: Provenance,
    pub proof_length: usize,
    pub criteria: Vec<Criterion>,
    /// Index of the sample's first line in the src/tgt files.
    pub first_line: usize,
}

/// Step samples plus one metadata record per contributing sample.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrainingSet {
    pub steps: Vec<StepSample>,
    pub meta: Vec<SampleMeta>,
}

impl TrainingSet {
    pub fn new() -> TrainingSet {
        TrainingSet::default()
    }

    pub fn add_sample(&mut self, sample: &Sample, criteria: Vec<Criterion>) -> Result<(), ExpandError> {
        let steps = expand_steps(std::slice::from_ref(sample))?;
        self.meta.push(SampleMeta {
            id: sample.id.clone(),
            provenance: sample.provenance,
            proof_length: steps.len(),
            criteria,
            first_line: self.steps.len(),
        });
        self.steps.extend(steps);
        Ok(())
    }

    pub fn add_generated(&mut self, samples: &[Sample]) -> Result<(), ExpandError> {
        samples.iter().try_for_each(|s| self.add_sample(s, vec![Criterion::Generated]))
    }

    pub fn add_selected(&mut self, selected: &[Selected]) -> Result<(), ExpandError> {
        selected.iter().try_for_each(|s| self.add_sample(&s.sample, s.criteria.clone()))
    }

    /// Hindsight steps are recorded as one-step samples with ids
    /// `{prefix}-{n}`.
    pub fn add_hindsight(&mut self, prefix: &str, steps: Vec<StepSample>) {
        for (n, s) in steps.into_iter().enumerate() {
            self.meta.push(SampleMeta {
                id: format!("{prefix}-{n}"),
                provenance: Provenance::Mined,
                proof_length: 1,
                criteria: vec![Criterion::Hindsight],
                first_line: self.steps.len(),
            });
            self.steps.push(s);
        }
    }

    /// Paths written by [`TrainingSet::write`] for a given prefix.
    pub fn paths(prefix: &Path) -> [PathBuf; 3] {
        let with = |ext: &str| {
            let mut s = prefix.as_os_str().to_owned();
            s.push(ext);
            PathBuf::from(s)
        };
        [with(".src"), with(".tgt"), with(".meta.jsonl")]
    }

    /// Writes `prefix.src` and `prefix.tgt` with one step per line, and
    /// `prefix.meta.jsonl` with one record per sample.
    pub fn write(&self, prefix: &Path) -> io::Result<()> {
        let [src, tgt, meta] = TrainingSet::paths(prefix);
        let mut src = BufWriter::new(File::create(src)?);
        let mut tgt = BufWriter::new(File::create(tgt)?);
        for s in &self.steps {
            writeln!(src, "{}", s.src)?;
            writeln!(tgt, "{}", s.tgt)?;
        }
        let mut meta = BufWriter::new(File::create(meta)?);
        for m in &self.meta {
            serde_json::to_writer(&mut meta, m)?;
            meta.write_all(b"\n")?;
        }
        src.flush()?;
        tgt.flush()?;
        meta.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_prefix;

    #[test]
    fn writes_aligned_line_files() {
        let sample = Sample {
            id: "syn-1".into(),
            prog_a: parse_prefix("s01 === ( +s s02 s03 ) ;").unwrap(),
            prog_b: parse_prefix("s01 === ( +s s03 s02 ) ;").unwrap(),
            gen_seq: Some(vec!["stm1 Commute N".parse().unwrap()]),
            provenance: Provenance::Synthetic,
        };
        let mut set = TrainingSet::new();
        set.add_generated(&[sample.clone(), sample]).unwrap();
        set.add_hindsight(
            "hs",
            vec![StepSample { src: "s01 === s02 ; Y s01 === s02 ;".into(), tgt: "stm1 Commute N".into() }],
        );
        let dir = tempfile::tempdir().unwrap();
        let prefix = dir.path().join("t1");
        set.write(&prefix).unwrap();
        let [src, tgt, meta] = TrainingSet::paths(&prefix);
        let src = std::fs::read_to_string(src).unwrap();
        let tgt = std::fs::read_to_string(tgt).unwrap();
        assert_eq!(src.lines().count(), 3);
        assert_eq!(tgt.lines().collect::<Vec<_>>(), vec!["stm1 Commute N"; 3]);
        let meta: Vec<SampleMeta> =
            std::fs::read_to_string(meta).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(meta.len(), 3);
        assert_eq!(meta[2].criteria, vec![Criterion::Hindsight]);
        assert_eq!(meta[1].first_line, 1);
    }
}
