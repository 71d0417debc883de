//! Instantiated traces, scores and their file formats.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pddl::{parse_instance, Domain, Fluent, Instance, PddlError, State};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error(transparent)]
    Pddl(#[from] PddlError),
    #[error("trace has no states")]
    Empty,
    #[error("trace refers to instance `{found}`, expected `{expected}`")]
    InstanceMismatch { expected: String, found: String },
    #[error("malformed fluent `{0}`")]
    BadFluent(String),
    #[error("step {step}: {source}")]
    Inapplicable { step: usize, source: PddlError },
    #[error("no score given for trace `{0}`")]
    UnknownId(String),
    #[error("score of trace `{0}` is not finite")]
    NonFiniteScore(String),
}

/// A state sequence over one instance, with its score.
#[derive(Debug, Clone, PartialEq)]
pub struct InstantiatedTrace {
    pub id: String,
    pub instance: Arc<Instance>,
    pub states: Vec<State>,
    pub score: f64,
}

impl InstantiatedTrace {
    pub fn new(
        id: impl Into<String>,
        instance: Arc<Instance>,
        states: Vec<State>,
        score: f64,
    ) -> Result<Self, TraceError> {
        let id = id.into();
        if states.is_empty() {
            return Err(TraceError::Empty);
        }
        if !score.is_finite() {
            return Err(TraceError::NonFiniteScore(id));
        }
        Ok(InstantiatedTrace {
            id,
            instance,
            states,
            score,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_positive(&self) -> bool {
        self.score >= 0.0
    }

    pub fn to_doc(&self) -> TraceDoc {
        TraceDoc {
            instance: self.instance.name.clone(),
            instance_file: None,
            score: Some(self.score),
            states: self
                .states
                .iter()
                .map(|s| s.iter().map(Fluent::to_string).collect())
                .collect(),
        }
    }
}

/// On-disk form of a trace (`*.trace.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDoc {
    /// Problem name of the instance.
    pub instance: String,
    /// Instance file, relative to the trace file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<f64>,
    pub states: Vec<Vec<String>>,
}

impl TraceDoc {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace documents always serialize")
    }
}

/// Validates a trace document against its domain and instance. The score
/// defaults to `+1.0`.
pub fn load_trace(
    doc: &TraceDoc,
    d: &Domain,
    i: Arc<Instance>,
) -> Result<InstantiatedTrace, TraceError> {
    if doc.instance.to_lowercase() != i.name {
        return Err(TraceError::InstanceMismatch {
            expected: i.name.clone(),
            found: doc.instance.clone(),
        });
    }
    if doc.states.is_empty() {
        return Err(TraceError::Empty);
    }
    let mut states = Vec::with_capacity(doc.states.len());
    for raw in &doc.states {
        let mut s = State::new();
        for text in raw {
            let f = Fluent::parse(text).ok_or_else(|| TraceError::BadFluent(text.clone()))?;
            d.check_fluent(&f, &i)?;
            s.insert(f);
        }
        states.push(s);
    }
    let id = i.name.clone();
    InstantiatedTrace::new(id, i, states, doc.score.unwrap_or(1.0))
}

/// Replays `plan` from the initial state. The plan need not reach the goal.
pub fn plan_to_trace(
    i: Arc<Instance>,
    plan: &[(String, Vec<String>)],
    d: &Domain,
) -> Result<InstantiatedTrace, TraceError> {
    let mut states = vec![i.init.clone()];
    for (step, (name, args)) in plan.iter().enumerate() {
        let op = d
            .ground(name, args, &i)
            .map_err(|source| TraceError::Inapplicable {
                step: step + 1,
                source,
            })?;
        let next = op
            .apply(states.last().expect("non-empty"))
            .map_err(|source| TraceError::Inapplicable {
                step: step + 1,
                source,
            })?;
        states.push(next);
    }
    let id = i.name.clone();
    InstantiatedTrace::new(id, i, states, 1.0)
}

/// A set of scored traces; positives are those with score `>= 0`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScoredSet {
    pub traces: Vec<InstantiatedTrace>,
}

impl ScoredSet {
    pub fn new(traces: Vec<InstantiatedTrace>) -> Self {
        ScoredSet { traces }
    }

    pub fn positives(&self) -> impl Iterator<Item = &InstantiatedTrace> {
        self.traces.iter().filter(|t| t.is_positive())
    }

    pub fn negatives(&self) -> impl Iterator<Item = &InstantiatedTrace> {
        self.traces.iter().filter(|t| !t.is_positive())
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Distinct instances, by name.
    pub fn instances(&self) -> BTreeMap<&str, &Arc<Instance>> {
        self.traces
            .iter()
            .map(|t| (t.instance.name.as_str(), &t.instance))
            .collect()
    }
}

/// Overrides every trace's score with `labeling[id]`.
pub fn assign_scores(
    traces: Vec<InstantiatedTrace>,
    labeling: &BTreeMap<String, f64>,
) -> Result<ScoredSet, TraceError> {
    let mut out = Vec::with_capacity(traces.len());
    for mut t in traces {
        let score = *labeling
            .get(&t.id)
            .ok_or_else(|| TraceError::UnknownId(t.id.clone()))?;
        if !score.is_finite() {
            return Err(TraceError::NonFiniteScore(t.id));
        }
        t.score = score;
        out.push(t);
    }
    Ok(ScoredSet::new(out))
}

#[derive(Debug, Error)]
pub enum TraceFileError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{}: no `instance_file` given", path.display())]
    NoInstance { path: PathBuf },
    #[error("{}: {source}", path.display())]
    Trace { path: PathBuf, source: TraceError },
}

fn read(path: &Path) -> Result<String, TraceFileError> {
    std::fs::read_to_string(path).map_err(|source| TraceFileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a `*.trace.json` file together with the instance it points to.
pub fn read_trace_file(path: &Path, d: &Domain) -> Result<InstantiatedTrace, TraceFileError> {
    let doc = TraceDoc::from_json(&read(path)?).map_err(|source| TraceFileError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let rel = doc
        .instance_file
        .as_ref()
        .ok_or_else(|| TraceFileError::NoInstance {
            path: path.to_path_buf(),
        })?;
    let ipath = path.parent().unwrap_or(Path::new(".")).join(rel);
    let trace_err = |source| TraceFileError::Trace {
        path: path.to_path_buf(),
        source,
    };
    let inst = parse_instance(&read(&ipath)?, d).map_err(|e| TraceFileError::Trace {
        path: ipath.clone(),
        source: e.into(),
    })?;
    load_trace(&doc, d, Arc::new(inst)).map_err(trace_err)
}

/// Every `*.trace.json` file directly inside `dir`, in file-name order.
pub fn read_trace_dir(dir: &Path, d: &Domain) -> Result<Vec<InstantiatedTrace>, TraceFileError> {
    let io = |source| TraceFileError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let p = entry.map_err(io)?.path();
        if p.to_string_lossy().ends_with(".trace.json") {
            paths.push(p);
        }
    }
    paths.sort();
    paths.iter().map(|p| read_trace_file(p, d)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pddl::{parse_domain, parse_instance};

    const DOMAIN: &str = "(define (domain pq) (:requirements :strips :typing) (:types t)
        (:predicates (p ?x - t) (q ?x - t))
        (:action flip :parameters (?x - t) :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))";
    const INSTANCE: &str =
        "(define (problem i1) (:domain pq) (:objects a - t) (:init (p a)) (:goal (q a)))";

    fn setup() -> (Domain, Arc<Instance>) {
        let d = parse_domain(DOMAIN).unwrap();
        let i = parse_instance(INSTANCE, &d).unwrap();
        (d, Arc::new(i))
    }

    #[test]
    fn loads_negative_trace() {
        let (d, i) = setup();
        let doc = TraceDoc::from_json(r#"{"instance":"i1","score":-1,"states":[["p a"],["q a"]]}"#)
            .unwrap();
        let t = load_trace(&doc, &d, i).unwrap();
        assert_eq!(t.len(), 2);
        assert!(!t.is_positive());
    }

    #[test]
    fn empty_and_unknown_fluents_fail() {
        let (d, i) = setup();
        let empty = TraceDoc::from_json(r#"{"instance":"i1","states":[]}"#).unwrap();
        assert_eq!(load_trace(&empty, &d, i.clone()), Err(TraceError::Empty));
        let bad = TraceDoc::from_json(r#"{"instance":"i1","states":[["p zz"]]}"#).unwrap();
        assert!(matches!(
            load_trace(&bad, &d, i),
            Err(TraceError::Pddl(PddlError::UnknownObject(_)))
        ));
    }

    #[test]
    fn default_score_is_positive_one() {
        let (d, i) = setup();
        let doc = TraceDoc::from_json(r#"{"instance":"i1","states":[[]]}"#).unwrap();
        assert_eq!(load_trace(&doc, &d, i).unwrap().score, 1.0);
    }

    #[test]
    fn plan_replay() {
        let (d, i) = setup();
        let empty = plan_to_trace(i.clone(), &[], &d).unwrap();
        assert_eq!(empty.states, vec![i.init.clone()]);
        let plan = vec![("flip".to_string(), vec!["a".to_string()])];
        let t = plan_to_trace(i.clone(), &plan, &d).unwrap();
        assert_eq!(t.len(), 2);
        assert!(t.states[1].contains(&Fluent::new("q", ["a"])));
        let twice = vec![plan[0].clone(), plan[0].clone()];
        assert!(matches!(
            plan_to_trace(i.clone(), &twice, &d),
            Err(TraceError::Inapplicable { step: 2, .. })
        ));
        let unknown = vec![("jump".to_string(), vec![])];
        assert!(matches!(
            plan_to_trace(i, &unknown, &d),
            Err(TraceError::Inapplicable {
                step: 1,
                source: PddlError::UnknownSchema(_)
            })
        ));
    }

    #[test]
    fn scores_partition_by_sign() {
        let (d, i) = setup();
        let mk = |id: &str| {
            let mut t = plan_to_trace(i.clone(), &[], &d).unwrap();
            t.id = id.into();
            t
        };
        let labels: BTreeMap<String, f64> =
            [("t1".into(), 1.0), ("t2".into(), -1.0), ("t3".into(), 0.0)].into();
        let set = assign_scores(vec![mk("t1"), mk("t2"), mk("t3")], &labels).unwrap();
        let pos: Vec<_> = set.positives().map(|t| t.id.as_str()).collect();
        assert_eq!(pos, ["t1", "t3"]);
        assert_eq!(set.negatives().count(), 1);
        assert!(matches!(
            assign_scores(vec![mk("t4")], &labels),
            Err(TraceError::UnknownId(_))
        ));
    }

    #[test]
    fn nine_trace_agent_labeling() {
        let (d, i) = setup();
        let mut traces = Vec::new();
        let mut labels = BTreeMap::new();
        for agent in ["gs", "ngf", "ngl"] {
            for k in 0..3 {
                let mut t = plan_to_trace(i.clone(), &[], &d).unwrap();
                t.id = format!("{agent}-{k}");
                labels.insert(t.id.clone(), if agent == "gs" { 1.0 } else { -1.0 });
                traces.push(t);
            }
        }
        let set = assign_scores(traces, &labels).unwrap();
        assert_eq!(set.positives().count(), 3);
    }
}
