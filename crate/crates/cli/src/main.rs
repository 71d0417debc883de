use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::path::{Component, Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ftlearn::bench::{evaluate, gen_setcover_instance, Candidate};
use ftlearn::encoder::{encode, parse_alphabet, scale_score, EncodeError, EncodeOptions};
use ftlearn::ftl::{holds, parse_formula, QuantKind};
use ftlearn::learner::{learn, LearnError, LearnOptions, LearnedFormula, Solver};
use ftlearn::maxsat::export_wcnf;
use ftlearn::pddl::{parse_domain, parse_instance, parse_plan, Domain};
use ftlearn::preprocess::{preprocess, PreprocessOptions, SplitArity};
use ftlearn::shapes::{gen_chains, ShapeConfig};
use ftlearn::trace::{plan_to_trace, read_trace_file, InstantiatedTrace, ScoredSet};

mod config;

/// Learn first-order temporal logic classifiers from PDDL traces.
#[derive(Parser)]
#[command(
    name = "ftlearn",
    version,
    after_help = "Any flag may also be set in a TOML file given with --config FILE."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn formulas separating positive from negative traces.
    Learn(LearnArgs),
    /// Check a formula on one trace; exits 0 if it holds and 1 otherwise.
    Check(CheckArgs),
    /// Classify test traces with learned formulas.
    Eval(EvalArgs),
    /// Replay a plan into a trace file.
    Trace(TraceArgs),
    /// Write the learning task of a Set Cover instance.
    GenSetcover(SetCoverArgs),
    /// Write the WCNF encoding of a single configuration.
    ExportWcnf(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Args)]
struct Prep {
    /// Split predicates down to this arity.
    #[arg(long, value_enum, default_value = "2")]
    split_arity: Split,
    /// Add goal predicates (`p_goal`) to every state.
    #[arg(long, value_enum, default_value = "on")]
    goal_predicates: OnOff,
}

impl Prep {
    fn options(&self) -> PreprocessOptions {
        PreprocessOptions {
            split: match self.split_arity {
                Split::One => Some(SplitArity::One),
                Split::Two => Some(SplitArity::Two),
                Split::None => None,
            },
            goal_predicates: matches!(self.goal_predicates, OnOff::On),
        }
    }
}

#[derive(Args)]
struct Data {
    #[arg(long)]
    domain: PathBuf,
    /// Trace file or directory of `*.trace.json` files scored +1.
    #[arg(long, required = true)]
    positive: Vec<PathBuf>,
    /// Trace file or directory of `*.trace.json` files scored -1.
    #[arg(long, required = true)]
    negative: Vec<PathBuf>,
    /// JSON map from trace file name (or path) to score, overriding +1/-1.
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct Encoding {
    /// Connector alphabet, e.g. `!,F,G,&,U` or `not,eventually,and`.
    #[arg(long)]
    ops: Option<String>,
    /// Quantifiers range over objects of exactly their type.
    #[arg(long)]
    strict_types: bool,
    /// Only universally quantified variables may fill atom slots.
    #[arg(long)]
    strict_eq4: bool,
    /// Decimal digits kept when turning scores into integer weights.
    #[arg(long, default_value_t = 0)]
    scale_digits: u32,
}

impl Encoding {
    fn options(&self) -> anyhow::Result<EncodeOptions> {
        let mut o = EncodeOptions {
            strict_types: self.strict_types,
            strict_eq4: self.strict_eq4,
            scale_digits: self.scale_digits,
            ..EncodeOptions::default()
        };
        if let Some(ops) = &self.ops {
            o.alphabet = parse_alphabet(ops).map_err(|e| Fail::usage(anyhow!("--ops: {e}")))?;
        }
        Ok(o)
    }
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    data: Data,
    #[command(flatten)]
    prep: Prep,
    #[command(flatten)]
    enc: Encoding,
    /// Largest number of connectors.
    #[arg(long)]
    max_ops: usize,
    /// Largest number of quantifiers.
    #[arg(long)]
    max_quantifiers: usize,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Solver time per configuration, in seconds.
    #[arg(long)]
    timeout_per_config: Option<f64>,
    /// Time for the whole run, in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Report only formulas scoring at least this much.
    #[arg(long)]
    min_score: Option<f64>,
    /// Stop once a formula separates the training set perfectly.
    #[arg(long)]
    first_perfect: bool,
    /// External MaxSAT solver command; `{}` is replaced by the WCNF file.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    formula: String,
    #[command(flatten)]
    prep: Prep,
    #[arg(long)]
    strict_types: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    data: Data,
    #[command(flatten)]
    prep: Prep,
    /// `formulas.json` from `learn`, or a text file with one formula per line.
    #[arg(long)]
    formulas: PathBuf,
    #[arg(long)]
    strict_types: bool,
    /// CSV report.
    #[arg(long)]
    out: PathBuf,
    /// Also write the best-per-cell table as Markdown.
    #[arg(long)]
    markdown: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[arg(long)]
    domain: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SetCoverArgs {
    /// Size n of the universe 1..=n.
    #[arg(long)]
    universe: usize,
    /// Sets separated by `;`, elements by `,`, e.g. `1,2;2,3`.
    #[arg(long, allow_hyphen_values = true)]
    sets: String,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    data: Data,
    #[command(flatten)]
    prep: Prep,
    #[command(flatten)]
    enc: Encoding,
    /// Chain id, e.g. `(.(..))`.
    #[arg(long)]
    chain: String,
    /// Quantifier kinds, universals first, e.g. `AE`.
    #[arg(long)]
    prefix: String,
    /// Comma-separated quantifier types.
    #[arg(long)]
    types: String,
    /// WCNF output; the variable map goes next to it as `.varmap.json`.
    #[arg(long)]
    out: PathBuf,
}

/// An error with the exit code it maps to.
#[derive(Debug)]
struct Fail {
    code: u8,
    err: anyhow::Error,
}

impl Fail {
    fn usage(err: anyhow::Error) -> anyhow::Error {
        anyhow::Error::new(Fail { code: 2, err })
    }
}

impl std::fmt::Display for Fail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.err)
    }
}

impl std::error::Error for Fail {}

const INPUT: u8 = 3;
const RESOURCE: u8 = 4;

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_domain(path: &Path) -> anyhow::Result<Domain> {
    parse_domain(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn trace_files(path: &Path) -> anyhow::Result<Vec<PathBuf>> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(path).with_context(|| format!("listing {}", path.display()))? {
        let p = entry?.path();
        if p.to_string_lossy().ends_with(".trace.json") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Loads every trace with its +1/-1 score, then applies the scores file.
fn load_set(d: &Domain, data: &Data) -> anyhow::Result<ScoredSet> {
    let mut traces: Vec<(PathBuf, InstantiatedTrace)> = Vec::new();
    for (dirs, score) in [(&data.positive, 1.0), (&data.negative, -1.0)] {
        for dir in dirs {
            for p in trace_files(dir)? {
                let mut t = read_trace_file(&p, d)?;
                t.score = score;
                traces.push((p, t));
            }
        }
    }
    if let Some(sp) = &data.scores {
        let map: BTreeMap<String, f64> = serde_json::from_str(&read(sp)?)
            .with_context(|| format!("parsing {}", sp.display()))?;
        let mut used = BTreeSet::new();
        for (p, t) in &mut traces {
            let full = p.to_string_lossy().into_owned();
            let name = p
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            if let Some((k, s)) = map
                .get_key_value(&full)
                .or_else(|| map.get_key_value(&name))
            {
                if !s.is_finite() {
                    bail!("{}: score of `{k}` is not finite", sp.display());
                }
                t.score = *s;
                used.insert(k.clone());
            }
        }
        if let Some(k) = map.keys().find(|k| !used.contains(*k)) {
            bail!("{}: `{k}` matches no trace", sp.display());
        }
    }
    Ok(ScoredSet::new(traces.into_iter().map(|(_, t)| t).collect()))
}

fn warn_lossy(ts: &ScoredSet, digits: u32) {
    for t in &ts.traces {
        if let Ok(w) = scale_score(t.score, digits) {
            if (w as f64) != t.score * 10f64.powi(digits as i32) {
                eprintln!(
                    "warning: score {} of `{}` is rounded; raise --scale-digits",
                    t.score, t.id
                );
                return;
            }
        }
    }
}

#[derive(Serialize)]
struct OutFormula<'a> {
    #[serde(flatten)]
    learned: &'a LearnedFormula,
    train_instances: usize,
}

fn cmd_learn(a: LearnArgs) -> anyhow::Result<u8> {
    let d = load_domain(&a.data.domain)?;
    let ts = load_set(&d, &a.data)?;
    let (pd, pts) = preprocess(&d, &ts, a.prep.options());
    let now = Instant::now();
    let opts = LearnOptions {
        encode: a.enc.options()?,
        solver: a.solver.clone().map_or(Solver::Internal, Solver::External),
        timeout_per_config: a.timeout_per_config.map(Duration::from_secs_f64),
        conflicts_per_config: None,
        deadline: a.timeout.map(|s| now + Duration::from_secs_f64(s)),
        workers: a.workers,
        min_score: a.min_score,
        first_perfect: a.first_perfect,
    };
    warn_lossy(&pts, opts.encode.scale_digits);
    let rep = learn(&pd, &pts, a.max_ops, a.max_quantifiers, &opts).map_err(|e| match e {
        LearnError::NoPositive | LearnError::NoNegative | LearnError::NoQuantifier => {
            Fail::usage(e.into())
        }
        e => e.into(),
    })?;
    let n = pts.instances().len();
    let out: Vec<OutFormula> = rep
        .formulas
        .iter()
        .map(|f| OutFormula {
            learned: f,
            train_instances: n,
        })
        .collect();
    write(&a.out, &(serde_json::to_string_pretty(&out)? + "\n"))?;
    let s = &rep.stats;
    eprintln!(
        "{} configurations: {} found, {} unsatisfiable, {} infeasible, {} too large, {} timed out, {} skipped; {} formulas in {:.1}s",
        s.configs,
        s.found,
        s.unsatisfiable,
        s.infeasible,
        s.too_large,
        s.timeouts,
        s.skipped,
        rep.formulas.len(),
        now.elapsed().as_secs_f64()
    );
    if let Some(best) = rep.formulas.first() {
        eprintln!("best ({}): {}", best.train_score, best.formula);
    }
    if !rep.complete {
        eprintln!(
            "run incomplete; partial results written to {}",
            a.out.display()
        );
        return Ok(RESOURCE);
    }
    Ok(0)
}

fn cmd_check(a: CheckArgs) -> anyhow::Result<u8> {
    let d = load_domain(&a.domain)?;
    let t = read_trace_file(&a.trace, &d)?;
    let (pd, pts) = preprocess(&d, &ScoredSet::new(vec![t]), a.prep.options());
    let f = parse_formula(&a.formula, &pd).map_err(|e| Fail::usage(anyhow!("--formula: {e}")))?;
    let opts = EncodeOptions {
        strict_types: a.strict_types,
        ..EncodeOptions::default()
    };
    let ok = holds(&pd, &pts.traces[0], &f, opts.check_options())?;
    println!("{ok}");
    Ok(if ok { 0 } else { 1 })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FormulaEntry {
    Text(String),
    Full(Candidate),
}

fn load_candidates(path: &Path, d: &Domain) -> anyhow::Result<Vec<Candidate>> {
    let text = read(path)?;
    let parse = |s: &str| parse_formula(s, d).with_context(|| format!("{}: `{s}`", path.display()));
    let entries: Vec<FormulaEntry> = match serde_json::from_str(&text) {
        Ok(e) => e,
        Err(_) => text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| FormulaEntry::Text(l.to_string()))
            .collect(),
    };
    entries
        .into_iter()
        .map(|e| match e {
            FormulaEntry::Text(s) => Ok(Candidate::new(parse(&s)?)),
            FormulaEntry::Full(c) => {
                let f = parse(&c.formula.to_string())?;
                let fresh = Candidate::new(f.clone());
                let known = c.ops != 0 || c.quantifiers != 0;
                Ok(Candidate {
                    formula: f,
                    ops: if known { c.ops } else { fresh.ops },
                    quantifiers: if known {
                        c.quantifiers
                    } else {
                        fresh.quantifiers
                    },
                    ..c
                })
            }
        })
        .collect()
}

fn cmd_eval(a: EvalArgs) -> anyhow::Result<u8> {
    let d = load_domain(&a.data.domain)?;
    let ts = load_set(&d, &a.data)?;
    let (pd, pts) = preprocess(&d, &ts, a.prep.options());
    let cands = load_candidates(&a.formulas, &pd)?;
    let opts = EncodeOptions {
        strict_types: a.strict_types,
        ..EncodeOptions::default()
    };
    let rep = evaluate(&pd, &cands, &pts, opts.check_options())?;
    write(&a.out, &rep.to_csv())?;
    let md = rep.to_markdown();
    if let Some(p) = &a.markdown {
        write(p, &md)?;
    }
    print!("{md}");
    Ok(0)
}

/// `target` relative to the directory `from`, when both resolve.
fn relative(target: &Path, from: &Path) -> PathBuf {
    let (Ok(t), Ok(f)) = (target.canonicalize(), from.canonicalize()) else {
        return target.to_path_buf();
    };
    let tc: Vec<Component> = t.components().collect();
    let fc: Vec<Component> = f.components().collect();
    let common = tc.iter().zip(&fc).take_while(|(a, b)| a == b).count();
    let mut out = PathBuf::new();
    for _ in common..fc.len() {
        out.push("..");
    }
    for c in &tc[common..] {
        out.push(c);
    }
    out
}

fn cmd_trace(a: TraceArgs) -> anyhow::Result<u8> {
    let d = load_domain(&a.domain)?;
    let inst = parse_instance(&read(&a.instance)?, &d)
        .with_context(|| format!("parsing {}", a.instance.display()))?;
    let plan =
        parse_plan(&read(&a.plan)?).with_context(|| format!("parsing {}", a.plan.display()))?;
    let t = plan_to_trace(Arc::new(inst), &plan, &d)
        .with_context(|| format!("replaying {}", a.plan.display()))?;
    let dir = a
        .out
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut doc = t.to_doc();
    doc.score = None;
    doc.instance_file = Some(
        relative(&a.instance, dir)
            .to_string_lossy()
            .replace('\\', "/"),
    );
    write(&a.out, &(doc.to_json() + "\n"))?;
    eprintln!("{} states", t.len());
    Ok(0)
}

fn parse_sets(spec: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|e| !e.is_empty())
                .map(|e| {
                    e.parse::<usize>()
                        .with_context(|| format!("--sets: bad element `{e}`"))
                })
                .collect()
        })
        .collect()
}

#[derive(Serialize)]
struct TaskInfo {
    max_ops: usize,
    max_quantifiers: usize,
    ell: f64,
}

fn cmd_setcover(a: SetCoverArgs) -> anyhow::Result<u8> {
    let sets = parse_sets(&a.sets).map_err(Fail::usage)?;
    let task = gen_setcover_instance(a.universe, &sets, a.k).map_err(|e| Fail::usage(e.into()))?;
    write(&a.out.join("domain.pddl"), &task.domain.to_pddl())?;
    for i in &task.instances {
        write(
            &a.out.join("instances").join(format!("{}.pddl", i.name)),
            &i.to_pddl(&task.domain),
        )?;
    }
    for t in &task.traces.traces {
        let side = if t.is_positive() {
            "positive"
        } else {
            "negative"
        };
        let mut doc = t.to_doc();
        doc.score = None;
        doc.instance_file = Some(format!("../instances/{}.pddl", t.instance.name));
        write(
            &a.out.join(side).join(format!("{}.trace.json", t.id)),
            &(doc.to_json() + "\n"),
        )?;
    }
    let info = TaskInfo {
        max_ops: task.r,
        max_quantifiers: task.q,
        ell: task.ell,
    };
    write(
        &a.out.join("task.json"),
        &(serde_json::to_string_pretty(&info)? + "\n"),
    )?;
    eprintln!(
        "wrote {} traces; learn with --max-ops {} --max-quantifiers {} --split-arity none --goal-predicates off",
        task.traces.len(),
        task.r,
        task.q
    );
    Ok(0)
}

fn shape_config(d: &Domain, chain: &str, prefix: &str, types: &str) -> anyhow::Result<ShapeConfig> {
    let r = chain.matches('(').count();
    let chain = gen_chains(r)
        .into_iter()
        .find(|c| c.id() == chain)
        .ok_or_else(|| anyhow!("--chain: `{chain}` is not a chain id such as `(.(..))`"))?;
    let prefix: Vec<QuantKind> = prefix
        .chars()
        .map(|c| match c.to_ascii_uppercase() {
            'A' => Ok(QuantKind::Forall),
            'E' => Ok(QuantKind::Exists),
            _ => Err(anyhow!("--prefix: expected letters A and E")),
        })
        .collect::<anyhow::Result<_>>()?;
    if prefix
        .windows(2)
        .any(|w| w[0] == QuantKind::Exists && w[1] == QuantKind::Forall)
    {
        bail!("--prefix: universals must come first");
    }
    let types = types
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| d.types.lookup(t).map_err(|e| anyhow!("--types: {e}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    if types.len() != prefix.len() {
        bail!(
            "--types: {} types for {} quantifiers",
            types.len(),
            prefix.len()
        );
    }
    Ok(ShapeConfig {
        chain,
        prefix,
        types,
    })
}

fn cmd_export(a: ExportArgs) -> anyhow::Result<u8> {
    let d = load_domain(&a.data.domain)?;
    let ts = load_set(&d, &a.data)?;
    let (pd, pts) = preprocess(&d, &ts, a.prep.options());
    let cfg = shape_config(&pd, &a.chain, &a.prefix, &a.types).map_err(Fail::usage)?;
    let opts = a.enc.options()?;
    let (w, vm) = match encode(&pd, &pts, &cfg, &opts) {
        Ok(x) => x,
        Err(e @ EncodeError::EnvCap { .. }) => {
            return Err(anyhow::Error::new(Fail {
                code: RESOURCE,
                err: e.into(),
            }))
        }
        Err(e) => return Err(e.into()),
    };
    write(&a.out, &export_wcnf(&w))?;
    let side = a.out.with_extension("varmap.json");
    write(
        &side,
        &(serde_json::to_string_pretty(&vm.to_json())? + "\n"),
    )?;
    eprintln!(
        "{} variables, {} hard and {} soft clauses",
        w.num_vars,
        w.hard.len(),
        w.soft.len()
    );
    Ok(0)
}

fn run(args: Vec<OsString>) -> anyhow::Result<u8> {
    let args = config::apply(args).map_err(Fail::usage)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Ok(e.exit_code() as u8);
        }
    };
    match cli.command {
        Command::Learn(a) => cmd_learn(a),
        Command::Check(a) => cmd_check(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Trace(a) => cmd_trace(a),
        Command::GenSetcover(a) => cmd_setcover(a),
        Command::ExportWcnf(a) => cmd_export(a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args_os().collect()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let code = e.downcast_ref::<Fail>().map_or(INPUT, |f| f.code);
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
