use std::sync::Arc;

use thiserror::Error;

use crate::ftl::{BinaryOp, Formula, QuantKind, Quantifier, Tl};
use crate::pddl::{Domain, Fluent, Instance, Predicate, State, TypeTree};
use crate::trace::{InstantiatedTrace, ScoredSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetCoverError {
    #[error("element {element} of set {set} is outside 1..={n}")]
    OutOfUniverse {
        element: usize,
        set: usize,
        n: usize,
    },
    #[error("the universe and the family must be non-empty")]
    Empty,
    #[error("k must be at least 1")]
    ZeroK,
}

/// Learning task built from a Set Cover instance. Formula scores are
/// integers: one point per covered element.
#[derive(Debug, Clone)]
pub struct SetCoverTask {
    pub domain: Domain,
    pub instances: Vec<Arc<Instance>>,
    pub traces: ScoredSet,
    /// Connector budget.
    pub r: usize,
    /// Quantifier budget, the cover size bound `k`.
    pub q: usize,
    /// Score reached exactly when every element trace is accepted.
    pub ell: f64,
}

pub fn set_type(i: usize) -> String {
    format!("set{}", i + 1)
}

pub fn set_object(i: usize) -> String {
    format!("s{}", i + 1)
}

/// Types `set1..setm` below `set`, predicate `in(set)`, objects `s_i` of
/// type `set_i` and a mock object `d` of type `set`. Element `j` becomes a
/// one-state positive trace holding `in(s_i)` for every set containing `j`;
/// the negative trace holds only `in(d)`.
pub fn gen_setcover_instance(
    n: usize,
    sets: &[Vec<usize>],
    k: usize,
) -> Result<SetCoverTask, SetCoverError> {
    if n == 0 || sets.is_empty() {
        return Err(SetCoverError::Empty);
    }
    if k == 0 {
        return Err(SetCoverError::ZeroK);
    }
    for (i, s) in sets.iter().enumerate() {
        if let Some(&e) = s.iter().find(|&&e| e == 0 || e > n) {
            return Err(SetCoverError::OutOfUniverse {
                element: e,
                set: i + 1,
                n,
            });
        }
    }
    let m = sets.len();
    let mut types = TypeTree::new();
    let set = types.add("set", types.root()).expect("fresh type");
    let subs: Vec<_> = (0..m)
        .map(|i| types.add(&set_type(i), set).expect("fresh type"))
        .collect();
    let mut domain = Domain::new("setcover", types);
    domain
        .add_predicate(Predicate {
            name: "in".into(),
            arg_types: vec![set],
        })
        .expect("single predicate");
    let mut objects: std::collections::BTreeMap<String, _> =
        (0..m).map(|i| (set_object(i), subs[i])).collect();
    objects.insert("d".into(), set);
    let instance = |name: String, facts: Vec<String>| {
        let s: State = facts.into_iter().map(|o| Fluent::new("in", [o])).collect();
        Arc::new(Instance {
            name,
            domain_name: "setcover".into(),
            objects: objects.clone(),
            init: s.clone(),
            goal: s,
        })
    };
    let mut instances = Vec::new();
    let mut traces = Vec::new();
    for j in 1..=n {
        let facts = (0..m)
            .filter(|&i| sets[i].contains(&j))
            .map(set_object)
            .collect();
        let inst = instance(format!("e{j}"), facts);
        traces.push(
            InstantiatedTrace::new(
                inst.name.clone(),
                inst.clone(),
                vec![inst.init.clone()],
                1.0,
            )
            .expect("valid"),
        );
        instances.push(inst);
    }
    let mock = instance("mock".into(), vec!["d".into()]);
    traces.push(
        InstantiatedTrace::new("mock", mock.clone(), vec![mock.init.clone()], -1.0).expect("valid"),
    );
    instances.push(mock);
    Ok(SetCoverTask {
        domain,
        instances,
        traces: ScoredSet::new(traces),
        r: m - 1,
        q: k,
        ell: n as f64,
    })
}

/// A smallest family of set indices covering `1..=n`, if any.
pub fn min_cover(n: usize, sets: &[Vec<usize>]) -> Option<Vec<usize>> {
    let m = sets.len();
    (0u32..1 << m)
        .filter(|mask| (1..=n).all(|e| (0..m).any(|i| mask >> i & 1 == 1 && sets[i].contains(&e))))
        .min_by_key(|mask| (mask.count_ones(), *mask))
        .map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).collect())
}

/// `∃x1∈set_{i1} … ∃xk∈set_{ik}. in(x1) ∨ … ∨ in(xk)` for a cover.
pub fn cover_formula(cover: &[usize]) -> Formula {
    let quantifiers = cover
        .iter()
        .enumerate()
        .map(|(j, &i)| Quantifier {
            kind: QuantKind::Exists,
            var: format!("x{}", j + 1),
            ty: set_type(i),
        })
        .collect();
    let core = (1..=cover.len())
        .map(|j| Tl::atom("in", [format!("x{j}")]))
        .reduce(|a, b| Tl::bin(BinaryOp::Or, a, b))
        .unwrap_or(Tl::True);
    Formula::new(quantifiers, core)
}
