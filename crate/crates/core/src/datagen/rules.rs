use rand::seq::{IteratorRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{NodePath, Program, VarId};
use crate::rewrite::{RewriteRule, Rewriter, RuleName};

use super::config::GenConfig;
use super::progen::prog_a_with;
use super::{GenError, Provenance, Sample};

const STATEMENT_RULES: [RuleName; 5] =
    [RuleName::SwapPrev, RuleName::UseVar, RuleName::DeleteStm, RuleName::Inline, RuleName::Rename];

fn var_choices(p: &Program, k: usize, name: RuleName) -> Vec<VarId> {
    let s = &p.stmts()[k];
    let before = || p.stmts()[..k].iter().map(|s| s.target);
    match name {
        RuleName::UseVar => {
            let mut v: Vec<VarId> = before().collect();
            v.sort();
            v.dedup();
            v
        }
        RuleName::Inline => s.rhs.vars().into_iter().filter(|v| before().any(|t| t == *v)).collect(),
        RuleName::Rename => VarId::all_of(s.target.ty()).collect(),
        _ => vec![],
    }
}

/// Tries statement rule `name` at statement index `k`, choosing uniformly
/// among the legal variable operands.
fn try_statement_rule<R: Rng>(
    rw: &Rewriter,
    p: &Program,
    k: usize,
    name: RuleName,
    rng: &mut R,
) -> Option<(RewriteRule, Program)> {
    let stm = k + 1;
    if name.takes_var() {
        let legal: Vec<(RewriteRule, Program)> = var_choices(p, k, name)
            .into_iter()
            .filter_map(|v| {
                let r = RewriteRule::with_var(stm, name, v);
                rw.apply(&r, p).ok().map(|q| (r, q))
            })
            .collect();
        legal.into_iter().choose(rng)
    } else {
        let r = RewriteRule::stmt(stm, name);
        rw.apply(&r, p).ok().map(|q| (r, q))
    }
}

fn try_node_rule<R: Rng>(
    rw: &Rewriter,
    p: &Program,
    k: usize,
    path: NodePath,
    name: RuleName,
    rng: &mut R,
) -> Option<(RewriteRule, Program)> {
    let stm = k + 1;
    let rule = if name == RuleName::NewTmp {
        let ty = p.stmts()[k].rhs.at(path)?.ty();
        let vars = p.vars();
        let v = VarId::all_of(ty).filter(|v| !vars.contains(v)).choose(rng)?;
        RewriteRule::new_tmp(stm, path, v)
    } else {
        RewriteRule::node(stm, name, path)
    };
    rw.apply(&rule, p).ok().map(|q| (rule, q))
}

/// One pass over every statement and node. Each rule's chance is drawn before
/// its eligibility is checked, and at most one rule fires per location.
fn rules_pass<R: Rng>(
    rw: &Rewriter,
    mut cur: Program,
    cfg: &GenConfig,
    intensity: f64,
    rng: &mut R,
    seq: &mut Vec<RewriteRule>,
) -> Program {
    let chance = |name: RuleName| (cfg.rule_prob(name) * intensity).clamp(0.0, 1.0);
    let mut node_rules: Vec<RuleName> = RuleName::node_rules().chain([RuleName::NewTmp]).collect();
    let mut stmt_rules = STATEMENT_RULES;
    let mut k = 0;
    while k < cur.len() {
        stmt_rules.shuffle(rng);
        let mut deleted = false;
        for name in stmt_rules {
            if !rng.gen_bool(chance(name)) {
                continue;
            }
            if let Some((rule, next)) = try_statement_rule(rw, &cur, k, name, rng) {
                deleted = name == RuleName::DeleteStm;
                seq.push(rule);
                cur = next;
                break;
            }
        }
        if deleted {
            continue;
        }
        let mut last: Option<NodePath> = None;
        loop {
            let next_path = cur.stmts()[k].rhs.paths().into_iter().find(|p| last.map_or(true, |l| *p > l));
            let Some(path) = next_path else {
                break;
            };
            last = Some(path);
            node_rules.shuffle(rng);
            for &name in &node_rules {
                if !rng.gen_bool(chance(name)) {
                    continue;
                }
                if let Some((rule, next)) = try_node_rule(rw, &cur, k, path, name, rng) {
                    seq.push(rule);
                    cur = next;
                    if name == RuleName::NewTmp {
                        k += 1;
                    }
                    break;
                }
            }
        }
        k += 1;
    }
    cur
}

/// Runs `cfg.passes` rule passes at a fixed intensity.
pub fn rules_with<R: Rng>(p: &Program, cfg: &GenConfig, intensity: f64, rng: &mut R) -> (Program, Vec<RewriteRule>) {
    let rw = Rewriter::new(cfg.limits);
    let mut seq = Vec::new();
    let mut cur = p.clone();
    for _ in 0..cfg.passes {
        cur = rules_pass(&rw, cur, cfg, intensity, rng, &mut seq);
    }
    (cur, seq)
}

/// One randomized rules pass, with intensity drawn from `cfg.intensity`.
pub fn apply_random_rules(p: &Program, cfg: &GenConfig, seed: u64) -> (Program, Vec<RewriteRule>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intensity = cfg.intensity.sample(&mut rng);
    let rw = Rewriter::new(cfg.limits);
    let mut seq = Vec::new();
    let out = rules_pass(&rw, p.clone(), cfg, intensity, &mut rng, &mut seq);
    (out, seq)
}

/// A synthetic pair: a random program and the result of several rule passes
/// over it. Pairs whose two programs are identical are redrawn unless every
/// rule probability is zero.
pub fn generate_pair(cfg: &GenConfig, seed: u64) -> Result<Sample, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cfg.max_retries.max(1) {
        let a = prog_a_with(cfg, &mut rng)?;
        let intensity = cfg.intensity.sample(&mut rng);
        let (b, seq) = rules_with(&a, cfg, intensity, &mut rng);
        if b == a && cfg.any_rule_enabled() {
            continue;
        }
        return Ok(Sample {
            id: format!("syn-{seed}"),
            prog_a: a,
            prog_b: b,
            gen_seq: Some(seq),
            provenance: Provenance::Synthetic,
        });
    }
    Err(GenError::RetriesExhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::config::Intensity;
    use crate::lang::parse_prefix;
    use crate::verify::verify_with;

    #[test]
    fn zero_probabilities_change_nothing() {
        let cfg = GenConfig::default().with_rule_probs(|_| 0.0);
        let s = generate_pair(&cfg, 3).unwrap();
        assert_eq!(s.prog_a, s.prog_b);
        assert_eq!(s.gen_seq, Some(vec![]));
    }

    #[test]
    fn commute_only_single_site() {
        let cfg = GenConfig {
            intensity: Intensity::fixed(1.0),
            ..GenConfig::default().with_rule_probs(|r| if r == RuleName::Commute { 1.0 } else { 0.0 })
        };
        let p = parse_prefix("s03 === ( +s s01 s02 ) ;").unwrap();
        let (q, seq) = apply_random_rules(&p, &cfg, 9);
        assert_eq!(seq, vec!["stm1 Commute N".parse().unwrap()]);
        assert_eq!(q.to_prefix(), "s03 === ( +s s02 s01 ) ;");
    }

    #[test]
    fn generated_sequences_verify() {
        let cfg = GenConfig::default();
        let rw = Rewriter::new(cfg.limits);
        for seed in 0..300 {
            let s = generate_pair(&cfg, seed).unwrap();
            let seq = s.gen_seq.as_ref().unwrap();
            assert!(!seq.is_empty());
            assert_ne!(s.prog_a, s.prog_b);
            let r = verify_with(&rw, &s.prog_a, &s.prog_b, seq, false);
            assert!(r.is_proven(), "seed {seed}: {:?}", r.status);
            assert_eq!(s, generate_pair(&cfg, seed).unwrap());
        }
    }
}
