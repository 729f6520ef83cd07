use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use progeq::curate::{SearchRecord, ROW_NAMES};
use progeq::datagen::Sample;

fn progeq(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_progeq")).current_dir(dir).args(args).output().expect("binary runs")
}

fn read_jsonl<T: serde::de::DeserializeOwned>(path: PathBuf) -> Vec<T> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn generate(dir: &Path, count: usize, seed: u64) {
    let out =
        progeq(dir, &["gen-synth", "--count", &count.to_string(), "--seed", &seed.to_string(), "--out", "pairs.jsonl"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn generated_sequences_verify_and_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 40, 11);
    let first = std::fs::read(dir.path().join("pairs.jsonl")).unwrap();
    let out = progeq(dir.path(), &["verify", "--samples", "pairs.jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    generate(dir.path(), 40, 11);
    assert_eq!(first, std::fs::read(dir.path().join("pairs.jsonl")).unwrap());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("pairs.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "gen-synth");
    assert_eq!(manifest["seed"], 11);
    assert_eq!(manifest["config"]["seed"], 11);
}

#[test]
fn missing_seed_is_generated_and_printed() {
    let dir = tempfile::tempdir().unwrap();
    let out = progeq(dir.path(), &["gen-synth", "--count", "2", "--out", "p.jsonl"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("generated seed"));
}

#[test]
fn oracle_proves_every_synthetic_pair() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 100, 3);
    let out = progeq(
        dir.path(),
        &[
            "prove",
            "--pairs",
            "pairs.jsonl",
            "--policy",
            "oracle",
            "--beam",
            "1",
            "--width",
            "1",
            "--out",
            "res.jsonl",
            "--jobs",
            "2",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records: Vec<SearchRecord> = read_jsonl(dir.path().join("res.jsonl"));
    let samples: Vec<Sample> = read_jsonl(dir.path().join("pairs.jsonl"));
    assert_eq!(records.len(), 100);
    for (r, s) in records.iter().zip(&samples) {
        assert_eq!(r.id, s.id);
        assert!(r.result.as_ref().unwrap().is_found(), "{}", r.id);
    }
    assert!(dir.path().join("res.jsonl.manifest.json").exists());
}

#[test]
fn verify_exit_codes_follow_the_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let good = "A: s01 === ( +s s02 s03 ) ;\nB: s01 === ( +s s03 s02 ) ;\nstm1 Commute N\n";
    let bad = "A: s01 === ( +s s02 s03 ) ;\nB: s01 === ( +s s03 s02 ) ;\nstm1 Commute N\nstm1 Commute N\n";
    std::fs::write(dir.path().join("good.proof"), good).unwrap();
    std::fs::write(dir.path().join("bad.proof"), bad).unwrap();
    std::fs::write(dir.path().join("pair.txt"), "s01 === ( +s s02 s03 ) ; Y s01 === ( +s s03 s02 ) ;\n").unwrap();
    std::fs::write(dir.path().join("rules.txt"), "# one step\nstm1 Commute N\n").unwrap();
    assert_eq!(progeq(dir.path(), &["verify", "--proof", "good.proof"]).status.code(), Some(0));
    let out = progeq(dir.path(), &["verify", "--proof", "bad.proof"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Mismatch"));
    let out = progeq(dir.path(), &["verify", "--pair", "pair.txt", "--proof", "rules.txt"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let out = progeq(dir.path(), &["prove", "--pairs", "missing.jsonl", "--policy", "oracle", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    let record: serde_json::Value = serde_json::from_str(stderr.lines().last().unwrap()).unwrap();
    assert_eq!(record["error"], "data");
    let out = progeq(dir.path(), &["prove", "--pairs", "p", "--policy", "psychic", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    let out = progeq(dir.path(), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dead_external_policy_is_a_transport_error() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 3, 5);
    let out =
        progeq(dir.path(), &["prove", "--pairs", "pairs.jsonl", "--policy", "external:exit 0", "--out", "res.jsonl"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let records: Vec<SearchRecord> = read_jsonl(dir.path().join("res.jsonl"));
    assert!(records.iter().all(|r| r.result.is_err()));
}

#[test]
fn eval_report_has_the_subset_rows() {
    let dir = tempfile::tempdir().unwrap();
    generate(dir.path(), 20, 9);
    let out = progeq(
        dir.path(),
        &["eval", "--pairs", "pairs.jsonl", "--policy", "oracle", "--beam", "1", "--width", "1", "--report", "table2"],
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("Rewrite Rules"));
    for (line, name) in lines[1..].iter().zip(ROW_NAMES) {
        assert!(line.starts_with(name), "{line}");
    }
    assert!(lines[1].contains("100%(20)"));
}

#[test]
fn curation_pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    generate(d, 12, 21);
    let ok = |args: &[&str]| {
        let out = progeq(d, args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    };
    ok(&["export", "--pairs", "pairs.jsonl", "--out", "t1"]);
    let src = std::fs::read_to_string(d.join("t1.src")).unwrap();
    let tgt = std::fs::read_to_string(d.join("t1.tgt")).unwrap();
    assert_eq!(src.lines().count(), tgt.lines().count());
    assert!(src.lines().all(|l| l.contains(" Y ")));
    ok(&[
        "prove",
        "--pairs",
        "pairs.jsonl",
        "--policy",
        "heuristic",
        "--beam",
        "2",
        "--width",
        "1",
        "--steps",
        "6",
        "--trace",
        "--out",
        "easy.jsonl",
    ]);
    ok(&[
        "prove",
        "--pairs",
        "pairs.jsonl",
        "--policy",
        "heuristic",
        "--beam",
        "2",
        "--width",
        "4",
        "--steps",
        "6",
        "--out",
        "hard.jsonl",
    ]);
    ok(&[
        "select",
        "--easy",
        "easy.jsonl",
        "--hard",
        "hard.jsonl",
        "--freqs",
        "t1.freqs.json",
        "--seed",
        "4",
        "--out",
        "sel.jsonl",
    ]);
    ok(&["hindsight", "--results", "easy.jsonl", "--freqs", "t1.freqs.json", "--out", "hs.jsonl"]);
    ok(&["export", "--selected", "sel.jsonl", "--hindsight", "hs.jsonl", "--out", "t2"]);
    for f in ["sel.jsonl.manifest.json", "hs.jsonl.manifest.json", "t2.manifest.json", "t2.meta.jsonl"] {
        assert!(d.join(f).exists(), "{f}");
    }
    ok(&["stats", "--pairs", "pairs.jsonl", "--format", "csv"]);
}
