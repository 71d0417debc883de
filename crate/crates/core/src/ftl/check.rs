use std::collections::BTreeMap;

use super::ast::{BinaryOp, Formula, QuantKind, Tl, UnaryOp};
use super::FtlError;
use crate::pddl::{Domain, Fluent, Instance, State};
use crate::trace::{InstantiatedTrace, ScoredSet};

/// Variable-to-object assignment.
pub type Environment = BTreeMap<String, String>;

pub const DEFAULT_CHECK_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    /// Quantify over objects whose type equals the quantifier type, rather
    /// than over all subtypes.
    pub strict_types: bool,
    /// Maximum number of environment-position checks per `holds` call.
    pub cap: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            strict_types: false,
            cap: DEFAULT_CHECK_CAP,
        }
    }
}

fn ground(pred: &str, args: &[String], e: &Environment) -> Result<Fluent, FtlError> {
    let objs = args
        .iter()
        .map(|a| {
            e.get(a)
                .cloned()
                .ok_or_else(|| FtlError::UnboundVariable(a.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Fluent {
        predicate: pred.to_string(),
        args: objs,
    })
}

/// `t, e, i ⊨ φ`, evaluated by direct recursion on the semantics.
pub fn check_tl(t: &[State], e: &Environment, i: usize, phi: &Tl) -> Result<bool, FtlError> {
    let n = t.len() - 1;
    Ok(match phi {
        Tl::True => true,
        Tl::Atom(p, args) => t[i].contains(&ground(p, args, e)?),
        Tl::Unary(op, a) => match op {
            UnaryOp::Not => !check_tl(t, e, i, a)?,
            UnaryOp::Next => i < n && check_tl(t, e, i + 1, a)?,
            UnaryOp::Yesterday => i > 0 && check_tl(t, e, i - 1, a)?,
            UnaryOp::Eventually => any(i..=n, |j| check_tl(t, e, j, a))?,
            UnaryOp::Always => all(i..=n, |j| check_tl(t, e, j, a))?,
            UnaryOp::Once => any(0..=i, |j| check_tl(t, e, j, a))?,
            UnaryOp::Historically => all(0..=i, |j| check_tl(t, e, j, a))?,
        },
        Tl::Binary(op, a, b) => match op {
            BinaryOp::And => check_tl(t, e, i, a)? && check_tl(t, e, i, b)?,
            BinaryOp::Or => check_tl(t, e, i, a)? || check_tl(t, e, i, b)?,
            BinaryOp::Implies => !check_tl(t, e, i, a)? || check_tl(t, e, i, b)?,
            BinaryOp::Until => any(i..=n, |j| {
                Ok(check_tl(t, e, j, b)? && all(i..j, |k| check_tl(t, e, k, a))?)
            })?,
        },
    })
}

fn any(
    r: impl Iterator<Item = usize>,
    mut f: impl FnMut(usize) -> Result<bool, FtlError>,
) -> Result<bool, FtlError> {
    for j in r {
        if f(j)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn all(
    r: impl Iterator<Item = usize>,
    mut f: impl FnMut(usize) -> Result<bool, FtlError>,
) -> Result<bool, FtlError> {
    for j in r {
        if !f(j)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Truth value of `φ` at every position, computed bottom-up.
pub fn eval_positions(t: &[State], e: &Environment, phi: &Tl) -> Result<Vec<bool>, FtlError> {
    let n = t.len();
    Ok(match phi {
        Tl::True => vec![true; n],
        Tl::Atom(p, args) => {
            let f = ground(p, args, e)?;
            t.iter().map(|s| s.contains(&f)).collect()
        }
        Tl::Unary(op, a) => {
            let mut v = eval_positions(t, e, a)?;
            match op {
                UnaryOp::Not => v.iter_mut().for_each(|x| *x = !*x),
                UnaryOp::Next => {
                    v.remove(0);
                    v.push(false);
                }
                UnaryOp::Yesterday => {
                    v.pop();
                    v.insert(0, false);
                }
                UnaryOp::Eventually => (0..n - 1).rev().for_each(|k| v[k] |= v[k + 1]),
                UnaryOp::Always => (0..n - 1).rev().for_each(|k| v[k] &= v[k + 1]),
                UnaryOp::Once => (1..n).for_each(|k| v[k] |= v[k - 1]),
                UnaryOp::Historically => (1..n).for_each(|k| v[k] &= v[k - 1]),
            }
            v
        }
        Tl::Binary(op, a, b) => {
            let va = eval_positions(t, e, a)?;
            let mut vb = eval_positions(t, e, b)?;
            match op {
                BinaryOp::And => vb.iter_mut().zip(&va).for_each(|(y, x)| *y &= *x),
                BinaryOp::Or => vb.iter_mut().zip(&va).for_each(|(y, x)| *y |= *x),
                BinaryOp::Implies => vb.iter_mut().zip(&va).for_each(|(y, x)| *y |= !*x),
                BinaryOp::Until => {
                    for k in (0..n - 1).rev() {
                        vb[k] = vb[k] || (va[k] && vb[k + 1]);
                    }
                }
            }
            vb
        }
    })
}

/// Objects each quantifier ranges over in `i`.
pub fn quantifier_domains<'a>(
    d: &Domain,
    i: &'a Instance,
    f: &Formula,
    strict_types: bool,
) -> Result<Vec<Vec<&'a str>>, FtlError> {
    f.quantifiers
        .iter()
        .map(|q| {
            let ty = d
                .types
                .get(&q.ty)
                .ok_or_else(|| FtlError::UnknownType(q.ty.clone()))?;
            Ok(i.objects_of(&d.types, ty, strict_types))
        })
        .collect()
}

/// `⟨t, ℐ⟩ ⊨ ψ` from the empty environment.
pub fn holds(
    d: &Domain,
    it: &InstantiatedTrace,
    f: &Formula,
    opts: CheckOptions,
) -> Result<bool, FtlError> {
    let domains = quantifier_domains(d, &it.instance, f, opts.strict_types)?;
    let envs = domains
        .iter()
        .try_fold(1u64, |acc, dom| acc.checked_mul(dom.len() as u64))
        .unwrap_or(u64::MAX);
    let checks = envs.saturating_mul(it.len() as u64);
    if checks > opts.cap {
        return Err(FtlError::ResourceLimit {
            checks,
            cap: opts.cap,
        });
    }
    let mut env = Environment::new();
    quantify(&it.states, f, &domains, 0, &mut env)
}

fn quantify(
    t: &[State],
    f: &Formula,
    domains: &[Vec<&str>],
    j: usize,
    env: &mut Environment,
) -> Result<bool, FtlError> {
    let Some(q) = f.quantifiers.get(j) else {
        return Ok(eval_positions(t, env, &f.core)?[0]);
    };
    let want = q.kind == QuantKind::Exists;
    for o in &domains[j] {
        env.insert(q.var.clone(), o.to_string());
        let v = quantify(t, f, domains, j + 1, env)?;
        if v == want {
            env.remove(&q.var);
            return Ok(want);
        }
    }
    env.remove(&q.var);
    Ok(!want)
}

/// Satisfaction of every trace of `ts`.
pub fn satisfied(
    d: &Domain,
    f: &Formula,
    ts: &ScoredSet,
    opts: CheckOptions,
) -> Result<Vec<bool>, FtlError> {
    ts.traces.iter().map(|t| holds(d, t, f, opts)).collect()
}

/// Sum of the scores of the traces satisfying `f`.
pub fn score(d: &Domain, f: &Formula, ts: &ScoredSet, opts: CheckOptions) -> Result<f64, FtlError> {
    let sat = satisfied(d, f, ts, opts)?;
    Ok(ts
        .traces
        .iter()
        .zip(sat)
        .filter(|(_, s)| *s)
        .map(|(t, _)| t.score)
        .sum())
}
