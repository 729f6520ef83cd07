use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use progeq::bridge::ExternalPolicy;
use progeq::curate::{
    self, EvalReport, SearchOutcomePair, SearchRecord, Selected, SelectionConfig, StepSample, TokenFreqs, TrainingSet,
};
use progeq::datagen::{self, compile_corpus, find_source_programs, CorpusStats, GenConfig, Sample};
use progeq::lang::{parse_pair, Limits};
use progeq::rewrite::{RewriteRule, Rewriter};
use progeq::search::exhaustive::DEFAULT_STATE_BUDGET;
use progeq::search::{
    exhaustive_prove_with, prove, HeuristicPolicy, ProofResult, ReplayPolicy, SearchConfig, SearchError,
};
use progeq::verify::{verify_with, ProofFile, VerifyStatus};

#[derive(Parser, Debug)]
#[command(name = "progeq", version, about = "Rewrite-rule equivalence proofs for straight-line programs")]
struct Cli {
    /// Worker threads for per-sample parallelism (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate synthetic pairs by random rewriting.
    GenSynth(GenSynthArgs),
    /// Build pairs by compiling a corpus of normalized source snippets.
    GenCompiled(GenCompiledArgs),
    /// Search for proofs of every pair.
    Prove(ProveArgs),
    /// Check a rewrite sequence; exits 0 only when it proves the pair.
    Verify(VerifyArgs),
    /// Pick training pairs from a narrow and a wide search run.
    Select(SelectArgs),
    /// Mine one-step samples with rare tokens from failed searches.
    Hindsight(HindsightArgs),
    /// Write src/tgt/meta training files and target-token frequencies.
    Export(ExportArgs),
    /// Report proof success rates by subset.
    Eval(EvalArgs),
    /// Corpus histograms: statements, nodes and sequence lengths.
    Stats(StatsArgs),
}

#[derive(Args, Debug, Serialize)]
struct GenSynthArgs {
    #[arg(long)]
    count: usize,
    /// Master seed; generated and printed when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Generator configuration as JSON; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Use the larger limits and three-output programs.
    #[arg(long)]
    generalization: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct GenCompiledArgs {
    /// One normalized snippet per line.
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
enum PolicySpec {
    Heuristic,
    Oracle,
    Exhaustive,
    External(String),
}

impl FromStr for PolicySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "heuristic" => Ok(PolicySpec::Heuristic),
            "oracle" => Ok(PolicySpec::Oracle),
            "exhaustive" => Ok(PolicySpec::Exhaustive),
            _ => match s.strip_prefix("external:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(PolicySpec::External(cmd.to_string())),
                _ => Err(format!("unknown policy `{s}`; expected heuristic, oracle, exhaustive or external:<cmd>")),
            },
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
struct SearchArgs {
    /// heuristic, oracle, exhaustive or external:<command>.
    #[arg(long)]
    policy: PolicySpec,
    /// Proposals requested per intermediate program.
    #[arg(long, default_value_t = 5)]
    beam: usize,
    /// Intermediate programs kept per step.
    #[arg(long, default_value_t = 2)]
    width: usize,
    /// Step limit; the depth bound of the exhaustive policy.
    #[arg(long, default_value_t = 25)]
    steps: usize,
    /// Search under the larger generalization limits.
    #[arg(long)]
    generalization: bool,
    /// Seconds to wait for each external policy answer.
    #[arg(long, default_value_t = 30)]
    timeout: u64,
}

impl SearchArgs {
    fn limits(&self) -> Limits {
        limits(self.generalization)
    }

    fn config(&self, trace: bool) -> SearchConfig {
        SearchConfig {
            beam: self.beam,
            intermediates: self.width,
            max_steps: self.steps,
            enforce_limits: true,
            limits: self.limits(),
            trace,
        }
    }
}

#[derive(Args, Debug, Serialize)]
struct ProveArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    /// Keep every legal expansion, for hindsight mining.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    /// Rule file. Starts with `A:` and `B:` lines unless `--pair` is given.
    #[arg(long, required_unless_present = "samples")]
    proof: Option<PathBuf>,
    /// File holding `ProgA Y ProgB`.
    #[arg(long, requires = "proof")]
    pair: Option<PathBuf>,
    /// Verify the generation sequence of every sample in a pairs file.
    #[arg(long, conflicts_with_all = ["proof", "pair"])]
    samples: Option<PathBuf>,
    #[arg(long)]
    generalization: bool,
}

#[derive(Args, Debug, Serialize)]
struct SelectArgs {
    /// Results of the narrow search.
    #[arg(long)]
    easy: PathBuf,
    /// Results of the wide search.
    #[arg(long)]
    hard: PathBuf,
    /// Target-token frequencies of the current training set.
    #[arg(long)]
    freqs: PathBuf,
    /// Selection configuration as JSON; missing fields take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct HindsightArgs {
    /// Search results recorded with `--trace`.
    #[arg(long, required = true, num_args = 1..)]
    results: Vec<PathBuf>,
    #[arg(long)]
    freqs: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ExportArgs {
    /// Pairs with generation sequences.
    #[arg(long)]
    pairs: Vec<PathBuf>,
    /// Output of `select`.
    #[arg(long)]
    selected: Vec<PathBuf>,
    /// Output of `hindsight`.
    #[arg(long)]
    hindsight: Vec<PathBuf>,
    /// Prefix of the written `.src`, `.tgt`, `.meta.jsonl` and `.freqs.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum ReportKind {
    Table2,
}

#[derive(Args, Debug, Serialize)]
struct EvalArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = ReportKind::Table2)]
    report: ReportKind,
    /// Also write the report as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
enum StatsFormat {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
struct StatsArgs {
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, value_enum, default_value_t = StatsFormat::Text)]
    format: StatsFormat,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Transport(String),
    /// The command ran but its check failed; the outcome is already reported.
    Rejected,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) | CliError::Rejected => 2,
            CliError::Transport(_) => 3,
        }
    }

    fn record(&self) -> Option<serde_json::Value> {
        let (kind, message) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Data(m) => ("data", m),
            CliError::Transport(m) => ("policy_transport", m),
            CliError::Rejected => return None,
        };
        Some(serde_json::json!({"error": kind, "code": self.code(), "message": message}))
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn data_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

fn limits(generalization: bool) -> Limits {
    if generalization {
        Limits::generalization()
    } else {
        Limits::default()
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| data_err(path, e))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| data_err(path, e))
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let file = fs::File::open(path).map_err(|e| data_err(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| data_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| data_err(path, format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> CliResult {
    let file = fs::File::create(path).map_err(|e| data_err(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| data_err(path, e))?;
        w.write_all(b"\n").map_err(|e| data_err(path, e))?;
    }
    w.flush().map_err(|e| data_err(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult {
    let text = serde_json::to_string_pretty(value).map_err(|e| data_err(path, e))?;
    fs::write(path, text + "\n").map_err(|e| data_err(path, e))
}

/// Everything needed to rerun a command and reproduce its outputs.
#[derive(Debug, Serialize)]
struct RunManifest<'a, A: Serialize, C: Serialize> {
    command: &'a str,
    arguments: &'a A,
    config: Option<&'a C>,
    seed: Option<u64>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    tool_version: &'static str,
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_manifest<A: Serialize, C: Serialize>(
    command: &str,
    out: &Path,
    arguments: &A,
    config: Option<&C>,
    seed: Option<u64>,
    inputs: &[&Path],
    outputs: &[&Path],
) -> CliResult {
    let m = RunManifest {
        command,
        arguments,
        config,
        seed,
        inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
        tool_version: env!("CARGO_PKG_VERSION"),
    };
    write_json(&manifest_path(out), &m)
}

/// Writes to stdout, treating a closed pipe as the reader's choice to stop.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("progeq: no --seed given, using generated seed {s}");
        s
    })
}

fn gen_config(path: Option<&Path>, generalization: bool) -> CliResult<GenConfig> {
    match path {
        Some(p) => read_json(p),
        None if generalization => Ok(GenConfig::generalization()),
        None => Ok(GenConfig::default()),
    }
}

fn gen_synth(args: &GenSynthArgs) -> CliResult {
    let mut cfg = gen_config(args.config.as_deref(), args.generalization)?;
    cfg.seed = resolve_seed(args.seed);
    let samples = datagen::generate_pairs(&cfg, args.count).map_err(|e| CliError::Data(e.to_string()))?;
    write_jsonl(&args.out, &samples)?;
    let inputs: Vec<&Path> = args.config.iter().map(PathBuf::as_path).collect();
    write_manifest("gen-synth", &args.out, args, Some(&cfg), Some(cfg.seed), &inputs, &[&args.out])
}

fn gen_compiled(args: &GenCompiledArgs) -> CliResult {
    let mut cfg = gen_config(args.config.as_deref(), false)?;
    cfg.seed = resolve_seed(args.seed);
    let (programs, errors) = find_source_programs(&read_text(&args.corpus)?);
    for e in &errors {
        log::warn!("{}: {e}", args.corpus.display());
    }
    if !errors.is_empty() {
        eprintln!("progeq: skipped {} unparseable corpus line(s)", errors.len());
    }
    let samples = compile_corpus(&programs, &cfg);
    write_jsonl(&args.out, &samples)?;
    write_manifest("gen-compiled", &args.out, args, Some(&cfg), Some(cfg.seed), &[&args.corpus], &[&args.out])
}

/// Policies shared by all samples of a run.
struct PolicyRuntime {
    spec: PolicySpec,
    external: Option<ExternalPolicy>,
}

impl PolicyRuntime {
    fn start(args: &SearchArgs) -> CliResult<PolicyRuntime> {
        let external = match &args.policy {
            PolicySpec::External(cmd) => Some(
                ExternalPolicy::spawn(cmd)
                    .map_err(|e| CliError::Transport(e.to_string()))?
                    .with_timeout(std::time::Duration::from_secs(args.timeout)),
            ),
            _ => None,
        };
        Ok(PolicyRuntime { spec: args.policy.clone(), external })
    }

    /// Searches one sample. The flag is set when the failure was the policy
    /// transport's.
    fn prove(&self, s: &Sample, cfg: &SearchConfig) -> (Result<ProofResult, String>, bool) {
        let rw = Rewriter::new(cfg.limits);
        let searched = match &self.spec {
            PolicySpec::Heuristic => prove(&s.prog_a, &s.prog_b, &HeuristicPolicy::new(rw), cfg),
            PolicySpec::Oracle => match &s.gen_seq {
                Some(seq) => {
                    let mut replay = ReplayPolicy::new();
                    replay.add(&rw, &s.prog_a, &s.prog_b, seq);
                    let cfg = SearchConfig { max_steps: cfg.max_steps.max(seq.len()), ..*cfg };
                    prove(&s.prog_a, &s.prog_b, &replay, &cfg)
                }
                None => return (Err("the oracle policy needs a generation sequence".into()), false),
            },
            PolicySpec::Exhaustive => {
                Ok(exhaustive_prove_with(&rw, &s.prog_a, &s.prog_b, cfg.max_steps, DEFAULT_STATE_BUDGET))
            }
            PolicySpec::External(_) => {
                prove(&s.prog_a, &s.prog_b, self.external.as_ref().expect("external policy started"), cfg)
            }
        };
        match searched {
            Ok(r) => match r.proof() {
                Some(seq) if !verify_with(&rw, &s.prog_a, &s.prog_b, seq, false).is_proven() => {
                    (Err("search returned a proof the verifier rejects".into()), false)
                }
                _ => (Ok(r), false),
            },
            Err(e) => {
                let transport = matches!(e, SearchError::Policy(_));
                (Err(e.to_string()), transport)
            }
        }
    }

    fn prove_all(&self, samples: &[Sample], cfg: &SearchConfig) -> (Vec<SearchRecord>, usize) {
        let results: Vec<(Result<ProofResult, String>, bool)> =
            samples.par_iter().map(|s| self.prove(s, cfg)).collect();
        let transport = results.iter().filter(|(_, t)| *t).count();
        let records = samples
            .iter()
            .zip(results)
            .map(|(s, (result, _))| SearchRecord {
                id: s.id.clone(),
                prog_a: s.prog_a.clone(),
                prog_b: s.prog_b.clone(),
                result,
            })
            .collect();
        (records, transport)
    }
}

fn check_search_args(args: &SearchArgs) -> CliResult {
    if args.beam == 0 || args.width == 0 || args.steps == 0 {
        return Err(CliError::Usage("--beam, --width and --steps must be at least 1".into()));
    }
    Ok(())
}

fn prove_cmd(args: &ProveArgs) -> CliResult {
    check_search_args(&args.search)?;
    let samples: Vec<Sample> = read_jsonl(&args.pairs)?;
    let cfg = args.search.config(args.trace);
    let runtime = PolicyRuntime::start(&args.search)?;
    let (records, transport) = runtime.prove_all(&samples, &cfg);
    write_jsonl(&args.out, &records)?;
    write_manifest("prove", &args.out, args, Some(&cfg), None, &[&args.pairs], &[&args.out])?;
    let found = records.iter().filter(|r| r.result.as_ref().is_ok_and(ProofResult::is_found)).count();
    eprintln!("progeq: {found} of {} pairs proven", records.len());
    if transport > 0 {
        return Err(CliError::Transport(format!("policy transport failed on {transport} pair(s)")));
    }
    Ok(())
}

fn parse_rules(text: &str, path: &Path) -> CliResult<Vec<RewriteRule>> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| l.parse().map_err(|e| data_err(path, format!("line {i}: {e}"))))
        .collect()
}

fn verify_cmd(args: &VerifyArgs) -> CliResult {
    let lim = limits(args.generalization);
    let rw = Rewriter::new(lim);
    if let Some(path) = &args.samples {
        let samples: Vec<Sample> = read_jsonl(path)?;
        let mut failures = 0;
        for s in &samples {
            let Some(seq) = &s.gen_seq else { continue };
            let status = verify_with(&rw, &s.prog_a, &s.prog_b, seq, false).status;
            if status != VerifyStatus::Proven {
                failures += 1;
                println!("{}", serde_json::json!({"id": s.id, "result": status}));
            }
        }
        println!("{}", serde_json::json!({"checked": samples.len(), "failures": failures}));
        return if failures == 0 { Ok(()) } else { Err(CliError::Rejected) };
    }
    let proof_path = args.proof.as_deref().expect("clap requires --proof here");
    let text = read_text(proof_path)?;
    let (a, b, rules) = match &args.pair {
        Some(pair_path) => {
            let (a, b) = parse_pair(read_text(pair_path)?.trim(), &lim).map_err(|e| data_err(pair_path, e))?;
            (a, b, parse_rules(&text, proof_path)?)
        }
        None => {
            let f = ProofFile::parse(&text, &lim).map_err(|e| data_err(proof_path, e))?;
            (f.a, f.b, f.rules)
        }
    };
    let status = verify_with(&rw, &a, &b, &rules, false).status;
    println!("{}", serde_json::to_string(&status).expect("status serializes"));
    if status == VerifyStatus::Proven {
        Ok(())
    } else {
        eprintln!("progeq: {status}");
        Err(CliError::Rejected)
    }
}

fn select_cmd(args: &SelectArgs) -> CliResult {
    let mut cfg: SelectionConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => SelectionConfig::default(),
    };
    cfg.seed = resolve_seed(args.seed);
    let easy: Vec<SearchRecord> = read_jsonl(&args.easy)?;
    let hard: Vec<SearchRecord> = read_jsonl(&args.hard)?;
    let freqs: TokenFreqs = read_json(&args.freqs)?;
    let (pairs, unmatched) = SearchOutcomePair::join(easy, hard);
    if !unmatched.is_empty() {
        eprintln!("progeq: {} sample id(s) appear in only one result file", unmatched.len());
    }
    let selected = curate::select(&pairs, &freqs, &cfg);
    write_jsonl(&args.out, &selected)?;
    eprintln!("progeq: selected {} of {} pairs", selected.len(), pairs.len());
    write_manifest(
        "select",
        &args.out,
        args,
        Some(&cfg),
        Some(cfg.seed),
        &[&args.easy, &args.hard, &args.freqs],
        &[&args.out],
    )
}

fn hindsight_cmd(args: &HindsightArgs) -> CliResult {
    let cfg: SelectionConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => SelectionConfig::default(),
    };
    let freqs: TokenFreqs = read_json(&args.freqs)?;
    let mut records = Vec::new();
    for p in &args.results {
        records.extend(read_jsonl::<SearchRecord>(p)?);
    }
    let steps = curate::hindsight(records.iter().filter_map(|r| r.result.as_ref().ok()), &freqs, &cfg);
    write_jsonl(&args.out, &steps)?;
    let mut inputs: Vec<&Path> = args.results.iter().map(PathBuf::as_path).collect();
    inputs.push(&args.freqs);
    write_manifest("hindsight", &args.out, args, Some(&cfg), None, &inputs, &[&args.out])
}

fn export_cmd(args: &ExportArgs) -> CliResult {
    let mut set = TrainingSet::new();
    for p in &args.pairs {
        let samples: Vec<Sample> = read_jsonl(p)?;
        set.add_generated(&samples).map_err(|e| data_err(p, e))?;
    }
    for p in &args.selected {
        let selected: Vec<Selected> = read_jsonl(p)?;
        set.add_selected(&selected).map_err(|e| data_err(p, e))?;
    }
    for (i, p) in args.hindsight.iter().enumerate() {
        let steps: Vec<StepSample> = read_jsonl(p)?;
        set.add_hindsight(&format!("hs{i}"), steps);
    }
    set.write(&args.out).map_err(|e| data_err(&args.out, e))?;
    let freqs = curate::token_frequencies(&set.steps);
    let [src, tgt, meta] = TrainingSet::paths(&args.out);
    let mut freqs_path = args.out.as_os_str().to_owned();
    freqs_path.push(".freqs.json");
    let freqs_path = PathBuf::from(freqs_path);
    write_json(&freqs_path, &freqs)?;
    eprintln!("progeq: wrote {} step samples from {} samples", set.steps.len(), set.meta.len());
    let inputs: Vec<&Path> =
        args.pairs.iter().chain(&args.selected).chain(&args.hindsight).map(PathBuf::as_path).collect();
    write_manifest::<_, ()>("export", &args.out, args, None, None, &inputs, &[&src, &tgt, &meta, &freqs_path])
}

fn eval_cmd(args: &EvalArgs) -> CliResult {
    check_search_args(&args.search)?;
    let samples: Vec<Sample> = read_jsonl(&args.pairs)?;
    let cfg = args.search.config(false);
    let runtime = PolicyRuntime::start(&args.search)?;
    let (records, transport) = runtime.prove_all(&samples, &cfg);
    let proven = records.iter().map(|r| r.result.as_ref().is_ok_and(ProofResult::is_found));
    let mut report = EvalReport::tally(samples.iter().zip(proven));
    report.errors = records.iter().filter(|r| r.result.is_err()).count();
    emit(&report.to_string());
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        write_manifest("eval", out, args, Some(&cfg), None, &[&args.pairs], &[out])?;
    }
    if transport > 0 {
        return Err(CliError::Transport(format!("policy transport failed on {transport} pair(s)")));
    }
    Ok(())
}

fn stats_cmd(args: &StatsArgs) -> CliResult {
    let samples: Vec<Sample> = read_jsonl(&args.pairs)?;
    let st = CorpusStats::of(&samples);
    let histograms = [
        ("statements", &st.statement_histogram),
        ("nodes", &st.node_histogram),
        ("proof_length", &st.length_histogram),
    ];
    let mut text = String::new();
    match args.format {
        StatsFormat::Json => text = serde_json::to_string_pretty(&st).expect("stats serialize") + "\n",
        StatsFormat::Csv => {
            text.push_str("histogram,bin,count\n");
            for (name, h) in histograms {
                for (bin, count) in h {
                    let _ = writeln!(text, "{name},{bin},{count}");
                }
            }
        }
        StatsFormat::Text => {
            let _ = writeln!(text, "pairs: {}  with sequence: {}", st.pairs, st.with_sequence);
            let _ = writeln!(
                text,
                "mean steps: {:.2}  max steps: {}  max nodes: {}",
                st.mean_steps, st.max_steps, st.max_nodes
            );
            for (name, h) in histograms {
                let _ = writeln!(text, "\n{name}:");
                let peak = h.values().copied().max().unwrap_or(1).max(1);
                for (bin, count) in h {
                    let bar = "#".repeat((count * 50).div_ceil(peak));
                    let _ = writeln!(text, "{bin:>5} {count:>8} {bar}");
                }
            }
            let _ = writeln!(text, "\nrule usage (share of sequences):");
            for (rule, n) in &st.pairs_using {
                let _ = writeln!(text, "{:<18} {:>6.1}%  ({n})", rule.as_str(), st.usage(*rule) * 100.0);
            }
        }
    }
    emit(&text);
    Ok(())
}

fn run(cli: &Cli) -> CliResult {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::GenSynth(a) => gen_synth(a),
        Command::GenCompiled(a) => gen_compiled(a),
        Command::Prove(a) => prove_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Select(a) => select_cmd(a),
        Command::Hindsight(a) => hindsight_cmd(a),
        Command::Export(a) => export_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Stats(a) => stats_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(rec) = e.record() {
                eprintln!("{rec}");
            }
            ExitCode::from(e.code())
        }
    }
}
