//! Compiler-style pass chains over normalized source programs. Every pass is
//! expressed as a sequence of rewrite rules, so the pairs it emits carry
//! verifiable sequences.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::lang::{parse_normalized_source, BinOp, Expr, NodePath, Program, Renaming, Role, VarId};
use crate::rewrite::axioms::rewrite_node;
use crate::rewrite::{RewriteRule, Rewriter, RuleName};

use super::config::GenConfig;
use super::rules::rules_with;
use super::{derive_seed, Provenance, Sample};

type Stage = (Program, Vec<RewriteRule>);

/// Common subexpression elimination: a repeated subtree gets a temporary via
/// `NewTmp` and its other occurrences are replaced with `UseVar`.
pub fn cse_pass(rw: &Rewriter, p: &Program) -> Stage {
    let mut cur = p.clone();
    let mut seq = Vec::new();
    let mut tried: HashSet<Expr> = HashSet::new();
    while let Some((k, path, e)) = next_repeated(&cur, &tried) {
        tried.insert(e.clone());
        let vars = cur.vars();
        let Some(v) = VarId::all_of(e.ty()).find(|v| !vars.contains(v)) else {
            continue;
        };
        let new_tmp = RewriteRule::new_tmp(k + 1, path, v);
        let Ok(mut next) = rw.apply(&new_tmp, &cur) else {
            continue;
        };
        let mut local = vec![new_tmp];
        for i in k + 1..next.len() {
            let r = RewriteRule::with_var(i + 1, RuleName::UseVar, v);
            if let Ok(q) = rw.apply(&r, &next) {
                next = q;
                local.push(r);
            }
        }
        if local.len() > 1 {
            cur = next;
            seq.extend(local);
        }
    }
    (cur, seq)
}

/// The largest non-leaf subtree occurring at least twice, located at its first
/// addressable occurrence.
fn next_repeated(p: &Program, tried: &HashSet<Expr>) -> Option<(usize, NodePath, Expr)> {
    let mut counts: HashMap<&Expr, usize> = HashMap::new();
    fn walk<'a>(e: &'a Expr, counts: &mut HashMap<&'a Expr, usize>) {
        if !e.is_leaf() {
            *counts.entry(e).or_default() += 1;
        }
        e.children().for_each(|c| walk(c, counts));
    }
    for s in p.stmts() {
        walk(&s.rhs, &mut counts);
    }
    let mut best: Option<(usize, NodePath, Expr)> = None;
    for (k, s) in p.stmts().iter().enumerate() {
        for path in s.rhs.paths() {
            let e = s.rhs.at(path).expect("enumerated path");
            if counts.get(e).copied().unwrap_or(0) < 2 || tried.contains(e) {
                continue;
            }
            if best.as_ref().map_or(true, |(_, _, b)| e.node_count() > b.node_count()) {
                best = Some((k, path, e.clone()));
            }
        }
    }
    best
}

const SIMPLIFY: [RuleName; 4] = [RuleName::NeutralOp, RuleName::AbsorbOp, RuleName::DoubleOp, RuleName::Cancel];

/// Strength reduction for this language: neutral and absorbing elements,
/// double negations and self-cancellations are simplified to a fixpoint.
pub fn strength_pass(rw: &Rewriter, p: &Program) -> Stage {
    let mut cur = p.clone();
    let mut seq = Vec::new();
    'outer: loop {
        for (k, s) in cur.stmts().iter().enumerate() {
            for path in s.rhs.paths() {
                let node = s.rhs.at(path).expect("enumerated path");
                for name in SIMPLIFY {
                    if rewrite_node(name, node).is_none() {
                        continue;
                    }
                    let r = RewriteRule::node(k + 1, name, path);
                    if let Ok(q) = rw.apply(&r, &cur) {
                        cur = q;
                        seq.push(r);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    (cur, seq)
}

/// Variable reuse: temporaries are renamed onto earlier temporaries whose
/// values are dead, then dead statements are removed.
pub fn reuse_pass(rw: &Rewriter, p: &Program) -> Stage {
    let mut cur = p.clone();
    let mut seq = Vec::new();
    for k in 1..cur.len() {
        if cur.stmts()[k].is_output {
            continue;
        }
        let roles = cur.roles();
        let earlier: Vec<VarId> =
            cur.stmts()[..k].iter().map(|s| s.target).filter(|v| roles.get(v) == Some(&Role::Temp)).collect();
        for v in earlier {
            let r = RewriteRule::with_var(k + 1, RuleName::Rename, v);
            if let Ok(q) = rw.apply(&r, &cur) {
                cur = q;
                seq.push(r);
                break;
            }
        }
    }
    'dead: loop {
        for k in 0..cur.len() {
            let r = RewriteRule::stmt(k + 1, RuleName::DeleteStm);
            if let Ok(q) = rw.apply(&r, &cur) {
                cur = q;
                seq.push(r);
                continue 'dead;
            }
        }
        break;
    }
    (cur, seq)
}

fn rule_vars(seq: &[RewriteRule]) -> impl Iterator<Item = VarId> + '_ {
    seq.iter().filter_map(|r| r.var)
}

fn encode_pair<R: Rng>(
    a: &Program,
    b: &Program,
    seq: Option<&[RewriteRule]>,
    rng: &mut R,
) -> Option<(Program, Program, Option<Vec<RewriteRule>>)> {
    let mut vars = a.vars();
    vars.extend(b.vars());
    if let Some(seq) = seq {
        vars.extend(rule_vars(seq));
    }
    let ren = Renaming::random(&vars, rng).ok()?;
    let seq = seq.map(|s| s.iter().map(|r| RewriteRule { var: r.var.map(|v| ren.var(v)), ..*r }).collect());
    Some((ren.program(a), ren.program(b), seq))
}

/// The pass chain `p -> cse -> strength -> reuse -> rules` and the pairs mixed
/// from it: each changed adjacent stage in both directions, plus the original
/// against the final program in both directions. Forward pairs carry their
/// rewrite sequence. Each pair's variables are renamed at random.
pub fn compile_pairs(p: &Program, seed: u64) -> Vec<Sample> {
    compile_pairs_with(p, &GenConfig::default(), seed)
}

pub fn compile_pairs_with(p: &Program, cfg: &GenConfig, seed: u64) -> Vec<Sample> {
    let rw = Rewriter::new(cfg.limits);
    if !cfg.limits.admits(p) {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stages: Vec<Stage> = vec![(p.clone(), Vec::new())];
    for pass in [cse_pass, strength_pass, reuse_pass] {
        let prev = &stages.last().expect("nonempty").0;
        stages.push(pass(&rw, prev));
    }
    let last = stages.last().expect("nonempty").0.clone();
    let intensity = cfg.intensity.sample(&mut rng);
    stages.push(rules_with(&last, cfg, intensity, &mut rng));

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (i, stage) in stages.iter().enumerate().skip(1) {
        if !stage.1.is_empty() {
            pairs.push((i - 1, i));
        }
    }
    let all: Vec<RewriteRule> = stages.iter().flat_map(|s| s.1.iter().copied()).collect();
    let mut out = Vec::new();
    let mut emit = |a: &Program, b: &Program, seq: Option<&[RewriteRule]>, rng: &mut ChaCha8Rng| {
        if let Some((a, b, seq)) = encode_pair(a, b, seq, rng) {
            out.push(Sample {
                id: format!("cmp-{seed}-{}", out.len()),
                prog_a: a,
                prog_b: b,
                gen_seq: seq,
                provenance: Provenance::Compiled,
            });
        }
    };
    for &(i, j) in &pairs {
        emit(&stages[i].0, &stages[j].0, Some(&stages[j].1), &mut rng);
        emit(&stages[j].0, &stages[i].0, None, &mut rng);
    }
    if pairs.len() > 1 {
        let fin = &stages.last().expect("nonempty").0;
        emit(p, fin, Some(&all), &mut rng);
        emit(fin, p, None, &mut rng);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct SourceError {
    pub line: usize,
    pub message: String,
}

fn has_mul_or_div(e: &Expr) -> bool {
    matches!(e, Expr::Binary(BinOp::MulS | BinOp::DivS | BinOp::MulSV, _, _)) || e.children().any(has_mul_or_div)
}

/// Whether `p` is worth compiling: two or more assignments, a multiply or
/// divide, and a temporary that flows into an output.
pub fn is_source_candidate(p: &Program) -> bool {
    if p.len() < 2 || !p.stmts().iter().any(|s| has_mul_or_div(&s.rhs)) {
        return false;
    }
    // Walk dependencies backwards from the outputs.
    let roles = p.roles();
    let mut needed: BTreeSet<VarId> = BTreeSet::new();
    for s in p.stmts().iter().rev() {
        if s.is_output || needed.remove(&s.target) {
            for v in s.rhs.vars() {
                if roles.get(&v) == Some(&Role::Temp) {
                    return true;
                }
                needed.insert(v);
            }
        }
    }
    false
}

/// Parses one normalized snippet per line, keeping the distinct programs that
/// pass [`is_source_candidate`]. Blank lines and `#` comments are skipped.
pub fn find_source_programs(corpus: &str) -> (Vec<Program>, Vec<SourceError>) {
    let mut seen = BTreeSet::new();
    let mut programs = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in corpus.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_normalized_source(line) {
            Ok(p) => {
                if is_source_candidate(&p) && seen.insert(p.to_prefix()) {
                    programs.push(p);
                }
            }
            Err(e) => errors.push(SourceError { line: i + 1, message: e.to_string() }),
        }
    }
    (programs, errors)
}

/// Compiled pairs for every source program, with per-program seeds.
pub fn compile_corpus(programs: &[Program], cfg: &GenConfig) -> Vec<Sample> {
    use rayon::prelude::*;
    programs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, p)| compile_pairs_with(p, cfg, derive_seed(cfg.seed, i as u64)))
        .collect()
}
