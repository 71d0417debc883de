//! Trace-set transformations applied before learning: predicate splitting to
//! a bounded arity and goal predicates through the latent state.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::pddl::{Domain, Fluent, Instance, Predicate, State};
use crate::trace::{InstantiatedTrace, ScoredSet};

/// Suffix of goal predicates in concrete (PDDL/trace/formula) syntax.
pub const GOAL_SUFFIX: &str = "_goal";

/// Maximum atom arity after splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitArity {
    One,
    Two,
}

impl SplitArity {
    pub fn bound(self) -> usize {
        match self {
            SplitArity::One => 1,
            SplitArity::Two => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessOptions {
    pub split: Option<SplitArity>,
    pub goal_predicates: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            split: Some(SplitArity::Two),
            goal_predicates: true,
        }
    }
}

/// Splits first, then adds goal predicates.
pub fn preprocess(d: &Domain, ts: &ScoredSet, opts: PreprocessOptions) -> (Domain, ScoredSet) {
    let (mut d, mut ts) = (d.clone(), ts.clone());
    if let Some(k) = opts.split {
        (d, ts) = split_predicates(&d, &ts, k);
    }
    if opts.goal_predicates {
        (d, ts) = add_goal_predicates(&d, &ts);
    }
    (d, ts)
}

fn fresh_name(base: String, taken: &BTreeSet<String>) -> String {
    let mut name = base;
    while taken.contains(&name) {
        name.push('_');
    }
    name
}

/// Rewrites every instance (by name) and every trace state through `f`.
fn rewrite(
    ts: &ScoredSet,
    inst_fn: impl Fn(&Instance) -> Instance,
    state_fn: impl Fn(&Instance, &State) -> State,
) -> ScoredSet {
    let mut cache: BTreeMap<String, Arc<Instance>> = BTreeMap::new();
    let traces = ts
        .traces
        .iter()
        .map(|t| {
            let inst = cache
                .entry(t.instance.name.clone())
                .or_insert_with(|| Arc::new(inst_fn(&t.instance)))
                .clone();
            InstantiatedTrace {
                id: t.id.clone(),
                states: t.states.iter().map(|s| state_fn(&t.instance, s)).collect(),
                instance: inst,
                score: t.score,
            }
        })
        .collect();
    ScoredSet::new(traces)
}

/// Projects every predicate of arity greater than `k` onto all argument pairs
/// (`k = 2`, names `p_ij`) or single arguments (`k = 1`, names `p_i`), with
/// 1-based indices. Action schemas are carried through unchanged.
pub fn split_predicates(d: &Domain, ts: &ScoredSet, k: SplitArity) -> (Domain, ScoredSet) {
    let bound = k.bound();
    let mut taken: BTreeSet<String> = d
        .predicates
        .values()
        .filter(|p| p.arity() <= bound)
        .map(|p| p.name.clone())
        .collect();
    // predicate -> [(new name, projected positions)]
    let mut projections: BTreeMap<String, Vec<(String, Vec<usize>)>> = BTreeMap::new();
    let mut out = Domain::new(d.name.clone(), d.types.clone());
    out.schemas = d.schemas.clone();
    for p in d.predicates.values() {
        if p.arity() <= bound {
            out.predicates.insert(p.name.clone(), p.clone());
            continue;
        }
        let n = p.arity();
        let positions: Vec<Vec<usize>> = match k {
            SplitArity::One => (0..n).map(|i| vec![i]).collect(),
            SplitArity::Two => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| vec![i, j]))
                .collect(),
        };
        let mut list = Vec::new();
        for pos in positions {
            let suffix: String = pos.iter().map(|i| (i + 1).to_string()).collect();
            let name = fresh_name(format!("{}_{suffix}", p.name), &taken);
            taken.insert(name.clone());
            out.predicates.insert(
                name.clone(),
                Predicate {
                    name: name.clone(),
                    arg_types: pos.iter().map(|&i| p.arg_types[i]).collect(),
                },
            );
            list.push((name, pos));
        }
        projections.insert(p.name.clone(), list);
    }
    let split_state = |s: &State| -> State {
        let mut next = State::new();
        for f in s.iter() {
            match projections.get(&f.predicate) {
                None => {
                    next.insert(f.clone());
                }
                Some(list) => {
                    for (name, pos) in list {
                        next.insert(Fluent {
                            predicate: name.clone(),
                            args: pos.iter().map(|&i| f.args[i].clone()).collect(),
                        });
                    }
                }
            }
        }
        next
    };
    let ts = rewrite(
        ts,
        |i| Instance {
            init: split_state(&i.init),
            goal: split_state(&i.goal),
            ..i.clone()
        },
        |_, s| split_state(s),
    );
    (out, ts)
}

/// Adds `p_goal` for every predicate `p`, and unions the latent state
/// `{p_goal(ō) : p(ō) ∈ goal}` into every state of every trace of the instance.
pub fn add_goal_predicates(d: &Domain, ts: &ScoredSet) -> (Domain, ScoredSet) {
    let mut taken: BTreeSet<String> = d.predicates.keys().cloned().collect();
    let mut goal_name = BTreeMap::new();
    let mut out = d.clone();
    for p in d.predicates.values() {
        let name = fresh_name(format!("{}{GOAL_SUFFIX}", p.name), &taken);
        taken.insert(name.clone());
        out.predicates.insert(
            name.clone(),
            Predicate {
                name: name.clone(),
                arg_types: p.arg_types.clone(),
            },
        );
        goal_name.insert(p.name.clone(), name);
    }
    let latent = |i: &Instance| -> Vec<Fluent> {
        i.goal
            .iter()
            .filter_map(|f| {
                goal_name.get(&f.predicate).map(|g| Fluent {
                    predicate: g.clone(),
                    args: f.args.clone(),
                })
            })
            .collect()
    };
    let ts = rewrite(ts, Instance::clone, |i, s| {
        let mut next = s.clone();
        for f in latent(i) {
            next.insert(f);
        }
        next
    });
    (out, ts)
}
