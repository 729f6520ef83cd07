//! Hand-built and seed-located example pairs exercised end to end.

use progeq::curate::expand_steps;
use progeq::datagen::{derive_seed, generate_pair, GenConfig, Provenance, Sample};
use progeq::lang::{check_limits, parse_prefix, Program, TypeTag};
use progeq::rewrite::{enumerate_legal, RewriteRule};
use progeq::search::{prove, ReplayPolicy, SearchConfig};
use progeq::verify::verify;

const PROG_A: &str = "s01 = ( -s s10 s11 ) ; s02 = ( *s s12 s01 ) ; s26 = ( +s s13 s14 ) ; \
                      s25 = ( /s s26 ( *s s02 s15 ) ) ; s27 === ( +s s25 s12 ) ;";
const PROG_B: &str = "s02 = ( *s ( -s s10 s11 ) s12 ) ; s25 = ( /s ( +s s14 s13 ) ( *s s02 s15 ) ) ; \
                      s27 === ( +s s12 s25 ) ;";
const PROOF: [&str; 11] = [
    "stm4 MultOne Nr",
    "stm4 Inline s26",
    "stm3 DeleteStm",
    "stm3 AssociativeLeft Nr",
    "stm3 Commute Nrl",
    "stm3 NeutralOp Nrl",
    "stm2 Inline s01",
    "stm1 DeleteStm",
    "stm1 Commute N",
    "stm3 Commute N",
    "stm2 Commute Nl",
];

fn proof() -> Vec<RewriteRule> {
    PROOF.iter().map(|r| r.parse().unwrap()).collect()
}

fn pair() -> (Program, Program) {
    (parse_prefix(PROG_A).unwrap(), parse_prefix(PROG_B).unwrap())
}

fn normalized(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[test]
fn programs_round_trip_to_their_token_text() {
    let (a, b) = pair();
    assert_eq!(a.to_prefix(), normalized(PROG_A));
    assert_eq!(b.to_prefix(), normalized(PROG_B));
    assert_eq!(parse_prefix(&a.to_prefix()).unwrap(), a);
}

#[test]
fn programs_are_within_limits() {
    let (a, b) = pair();
    assert!(check_limits(&a).1.is_empty());
    assert!(check_limits(&b).1.is_empty());
}

#[test]
fn first_step_is_among_the_legal_rewrites() {
    let (a, _) = pair();
    let legal: Vec<String> = enumerate_legal(&a).iter().map(ToString::to_string).collect();
    assert!(legal.iter().any(|r| r == "stm4 MultOne Nr"));
    assert!(legal.iter().any(|r| r == "stm4 Inline s26"));
}

#[test]
fn eleven_step_proof_verifies() {
    let (a, b) = pair();
    assert!(verify(&a, &b, &proof()).is_proven());
    let short = &proof()[..10];
    assert!(!verify(&a, &b, short).is_proven());
}

#[test]
fn eleven_step_proof_expands_to_eleven_samples() {
    let (a, b) = pair();
    let sample = Sample {
        id: "example".into(),
        prog_a: a,
        prog_b: b,
        gen_seq: Some(proof()),
        provenance: Provenance::Synthetic,
    };
    let steps = expand_steps(&[sample]).unwrap();
    assert_eq!(steps.len(), 11);
    for (s, r) in steps.iter().zip(PROOF) {
        assert_eq!(s.tgt, r);
        assert!(s.src.ends_with(&format!(" Y {}", normalized(PROG_B))));
    }
    assert!(steps[0].src.starts_with(&normalized(PROG_A)));
}

#[test]
fn replay_search_recovers_the_proof() {
    let (a, b) = pair();
    let rw = progeq::rewrite::Rewriter::default();
    let mut replay = ReplayPolicy::new();
    replay.add(&rw, &a, &b, &proof());
    let r = prove(&a, &b, &replay, &SearchConfig::new(1, 1)).unwrap();
    assert_eq!(r.proof_length(), Some(11));
    assert!(verify(&a, &b, r.proof().unwrap()).is_proven());
}

fn vector_and_scalar_outputs(p: &Program) -> bool {
    let outs = p.outputs();
    outs.len() == 2
        && outs.iter().filter(|v| v.ty() == TypeTag::Vector).count() == 1
        && outs.iter().filter(|v| v.ty() == TypeTag::Scalar).count() == 1
}

#[test]
fn some_seed_yields_a_six_statement_nine_step_pair() {
    let cfg = GenConfig::default();
    let (i, found) = (0..50_000u64)
        .map(|i| (i, generate_pair(&cfg, derive_seed(cfg.seed, i)).unwrap()))
        .find(|(_, s)| {
            s.prog_a.len() == 6 && vector_and_scalar_outputs(&s.prog_a) && s.gen_seq.as_ref().unwrap().len() == 9
        })
        .expect("a matching seed exists");
    let seq = found.gen_seq.as_ref().unwrap();
    assert!(verify(&found.prog_a, &found.prog_b, seq).is_proven());
    let again = generate_pair(&cfg, derive_seed(cfg.seed, i)).unwrap();
    assert_eq!(again, found);
}
