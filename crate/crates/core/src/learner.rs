//! The search loop: every shape configuration within the budgets is encoded,
//! solved and decoded independently, and the surviving formulas are ranked.

use std::cmp::Ordering as CmpOrdering;
use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::encoder::{decode, encode, scale_score, EncodeError, EncodeOptions};
use crate::ftl::{satisfied, Formula, FtlError, QuantKind};
use crate::maxsat::{self, solve_external, Budget, DimacsError, Status};
use crate::pddl::Domain;
use crate::shapes::{gen_configs, ShapeConfig};
use crate::trace::ScoredSet;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Solver {
    #[default]
    Internal,
    /// Shell command of an external MaxSAT solver; see [`solve_external`].
    External(String),
}

#[derive(Debug, Clone, Default)]
pub struct LearnOptions {
    pub encode: EncodeOptions,
    pub solver: Solver,
    pub timeout_per_config: Option<Duration>,
    pub conflicts_per_config: Option<u64>,
    /// Deadline for the whole run; configurations not started by then are skipped.
    pub deadline: Option<Instant>,
    /// Worker threads; 0 uses rayon's default.
    pub workers: usize,
    /// Only formulas scoring at least this much are reported.
    pub min_score: Option<f64>,
    /// Stop scheduling configurations once a perfectly separating formula is found.
    pub first_perfect: bool,
}

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("no positive trace (score >= 0) to learn from")]
    NoPositive,
    #[error("no negative trace (score < 0) to learn from")]
    NoNegative,
    #[error("at least one quantifier is required")]
    NoQuantifier,
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Check(#[from] FtlError),
    #[error(transparent)]
    External(#[from] DimacsError),
}

/// Why a configuration produced no formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fail {
    /// No well-formed discriminative formula has this shape.
    Unsatisfiable,
    /// The configuration admits no well-formed formula at all.
    Infeasible(String),
    /// The encoding exceeds the environment cap.
    TooLarge(String),
    /// The solver budget ran out before any model was found.
    Timeout,
    /// Skipped because of the global deadline or an earlier perfect formula.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Found {
    pub formula: Formula,
    /// Score recomputed by the model checker.
    pub score: f64,
    /// The same score in scaled integer units.
    pub scaled_score: i64,
    /// False when the solver stopped early with a model that may be suboptimal.
    pub optimal: bool,
    /// Whether the formula accepts every positive and rejects every negative.
    pub perfect: bool,
}

/// Per-configuration result with timing.
#[derive(Debug, Clone, PartialEq)]
pub struct Attempt {
    pub result: Result<Found, Fail>,
    pub solve_time: Duration,
}

/// Encodes, solves and decodes one configuration. Every returned formula has
/// been re-scored by the model checker.
pub fn find_formula(
    d: &Domain,
    ts: &ScoredSet,
    cfg: &ShapeConfig,
    opts: &LearnOptions,
) -> Result<Attempt, LearnError> {
    find_with(d, ts, cfg, opts, None)
}

fn find_with(
    d: &Domain,
    ts: &ScoredSet,
    cfg: &ShapeConfig,
    opts: &LearnOptions,
    cancel: Option<Arc<AtomicBool>>,
) -> Result<Attempt, LearnError> {
    let start = Instant::now();
    let attempt = |result| Attempt {
        result,
        solve_time: start.elapsed(),
    };
    let (w, vm) = match encode(d, ts, cfg, &opts.encode) {
        Ok(x) => x,
        Err(EncodeError::Infeasible(why)) => return Ok(attempt(Err(Fail::Infeasible(why)))),
        Err(e @ EncodeError::EnvCap { .. }) => {
            return Ok(attempt(Err(Fail::TooLarge(e.to_string()))))
        }
        Err(e) => return Err(e.into()),
    };
    let outcome = match &opts.solver {
        Solver::Internal => {
            let deadline = opts.timeout_per_config.map(|t| start + t);
            let deadline = match (deadline, opts.deadline) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            let budget = Budget {
                deadline,
                conflicts: opts.conflicts_per_config,
                cancel,
            };
            maxsat::solve(&w, &budget)
        }
        Solver::External(cmd) => solve_external(&w, cmd)?,
    };
    let optimal = match outcome.status {
        Status::Optimum => true,
        Status::SatisfiableBounded => false,
        Status::Unsatisfiable => return Ok(attempt(Err(Fail::Unsatisfiable))),
        Status::Timeout => return Ok(attempt(Err(Fail::Timeout))),
    };
    let model = outcome.model.expect("model with a satisfiable status");
    let cost = outcome.cost.expect("cost with a satisfiable status");
    let formula = decode(&model, &vm, cfg, d).expect("hard clauses fix one label per node");

    let sat = satisfied(d, &formula, ts, opts.encode.check_options())?;
    let claimed: Vec<bool> = vm.s.iter().map(|l| l.eval(&model)).collect();
    assert_eq!(
        sat, claimed,
        "checker disagrees with the encoding on `{formula}`"
    );
    let scaled: i64 = vm
        .weights
        .iter()
        .zip(&sat)
        .filter(|(_, s)| **s)
        .map(|(w, _)| *w)
        .sum();
    assert_eq!(
        scaled,
        vm.implied_score(cost),
        "score of `{formula}` differs from the solver cost"
    );
    let score = ts
        .traces
        .iter()
        .zip(&sat)
        .filter(|(_, s)| **s)
        .map(|(t, _)| t.score)
        .sum();
    let perfect = ts
        .traces
        .iter()
        .zip(&sat)
        .all(|(t, s)| t.is_positive() == *s);
    Ok(attempt(Ok(Found {
        formula,
        score,
        scaled_score: scaled,
        optimal,
        perfect,
    })))
}

/// A ranked result of [`learn`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnedFormula {
    pub formula: Formula,
    pub train_score: f64,
    #[serde(skip)]
    pub scaled_score: i64,
    pub ops: usize,
    pub quantifiers: usize,
    pub chain_id: String,
    /// One letter per quantifier, `A` or `E`.
    pub prefix: String,
    pub types: Vec<String>,
    pub optimal: bool,
    pub solve_time_ms: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LearnStats {
    pub configs: usize,
    pub found: usize,
    pub unsatisfiable: usize,
    pub infeasible: usize,
    pub too_large: usize,
    pub timeouts: usize,
    pub skipped: usize,
    /// Formulas after deduplication, before the score threshold.
    pub distinct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnReport {
    pub formulas: Vec<LearnedFormula>,
    pub stats: LearnStats,
    /// False if some configuration was skipped or timed out.
    pub complete: bool,
}

fn prefix_letters(p: &[QuantKind]) -> String {
    p.iter()
        .map(|k| if *k == QuantKind::Forall { 'A' } else { 'E' })
        .collect()
}

/// Trace order fixed independently of how the set was read.
pub fn canonical_order(ts: &ScoredSet) -> ScoredSet {
    let mut traces = ts.traces.clone();
    traces.sort_by(|a, b| {
        (a.instance.name.as_str(), a.id.as_str())
            .cmp(&(b.instance.name.as_str(), b.id.as_str()))
            .then(a.score.partial_cmp(&b.score).unwrap_or(CmpOrdering::Equal))
            .then_with(|| a.states.cmp(&b.states))
    });
    ScoredSet::new(traces)
}

/// Every configuration searched by [`learn`], in order, with its budgets.
pub fn search_space(d: &Domain, r: usize, q: usize) -> Vec<(usize, usize, ShapeConfig)> {
    let mut out = Vec::new();
    for rr in 0..=r {
        for qq in 1..=q {
            out.extend(gen_configs(d, rr, qq).into_iter().map(|c| (rr, qq, c)));
        }
    }
    out
}

/// Runs every configuration with at most `r` connectors and between 1 and
/// `q` quantifiers, and ranks the distinct formulas found by score, then by
/// size and text.
pub fn learn(
    d: &Domain,
    ts: &ScoredSet,
    r: usize,
    q: usize,
    opts: &LearnOptions,
) -> Result<LearnReport, LearnError> {
    if ts.positives().next().is_none() {
        return Err(LearnError::NoPositive);
    }
    if ts.negatives().next().is_none() {
        return Err(LearnError::NoNegative);
    }
    if q == 0 {
        return Err(LearnError::NoQuantifier);
    }
    let ts = canonical_order(ts);
    let tasks = search_space(d, r, q);
    let stop = Arc::new(AtomicBool::new(false));
    let run = |(_, _, cfg): &(usize, usize, ShapeConfig)| -> Result<Attempt, LearnError> {
        let late = opts.deadline.is_some_and(|t| Instant::now() >= t);
        if late || stop.load(Ordering::Relaxed) {
            let skipped = Attempt {
                result: Err(Fail::Skipped),
                solve_time: Duration::ZERO,
            };
            return Ok(skipped);
        }
        let cancel = opts.first_perfect.then(|| stop.clone());
        let a = find_with(d, &ts, cfg, opts, cancel)?;
        if opts.first_perfect && matches!(&a.result, Ok(f) if f.perfect && f.optimal) {
            stop.store(true, Ordering::Relaxed);
        }
        Ok(a)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .expect("thread pool");
    let results: Vec<Attempt> =
        pool.install(|| tasks.par_iter().map(run).collect::<Result<Vec<_>, _>>())?;

    let mut stats = LearnStats {
        configs: results.len(),
        ..LearnStats::default()
    };
    let mut formulas = Vec::new();
    for ((rr, qq, cfg), a) in tasks.into_iter().zip(results) {
        match a.result {
            Ok(f) => {
                stats.found += 1;
                formulas.push(LearnedFormula {
                    formula: f.formula,
                    train_score: f.score,
                    scaled_score: f.scaled_score,
                    ops: rr,
                    quantifiers: qq,
                    chain_id: cfg.chain.id(),
                    prefix: prefix_letters(&cfg.prefix),
                    types: cfg
                        .types
                        .iter()
                        .map(|&t| d.types.name(t).to_string())
                        .collect(),
                    optimal: f.optimal,
                    solve_time_ms: a.solve_time.as_millis() as u64,
                });
            }
            Err(Fail::Unsatisfiable) => stats.unsatisfiable += 1,
            Err(Fail::Infeasible(_)) => stats.infeasible += 1,
            Err(Fail::TooLarge(_)) => stats.too_large += 1,
            Err(Fail::Timeout) => stats.timeouts += 1,
            Err(Fail::Skipped) => stats.skipped += 1,
        }
    }
    // A formula whose search was cut short by the cancel flag is still valid.
    let complete = stats.timeouts == 0 && stats.skipped == 0 && formulas.iter().all(|f| f.optimal);
    formulas = rank(formulas);
    stats.distinct = formulas.len();
    if let Some(min) = opts.min_score {
        let min_scaled = scale_score(min, opts.encode.scale_digits)?;
        formulas.retain(|f| f.scaled_score >= min_scaled);
    }
    Ok(LearnReport {
        formulas,
        stats,
        complete,
    })
}

/// Sorts by score (descending), then by budgets and text, and drops later
/// copies of the same formula text.
pub fn rank(mut formulas: Vec<LearnedFormula>) -> Vec<LearnedFormula> {
    let mut keyed: Vec<(String, LearnedFormula)> = formulas
        .drain(..)
        .map(|f| (f.formula.to_string(), f))
        .collect();
    keyed.sort_by(|(ta, a), (tb, b)| {
        b.scaled_score
            .cmp(&a.scaled_score)
            .then(a.ops.cmp(&b.ops))
            .then(a.quantifiers.cmp(&b.quantifiers))
            .then_with(|| ta.cmp(tb))
    });
    let mut seen = HashSet::new();
    keyed
        .into_iter()
        .filter(|(t, _)| seen.insert(t.clone()))
        .map(|(_, f)| f)
        .collect()
}

/// Unscaled score corresponding to a scaled one.
pub fn unscale(scaled: i64, digits: u32) -> f64 {
    scaled as f64 / 10f64.powi(digits as i32)
}
