use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ftl::{satisfied, validate, CheckOptions, Formula, FtlError};
use crate::pddl::Domain;
use crate::trace::ScoredSet;

/// A formula to evaluate, with the budgets and training-set size it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub formula: Formula,
    #[serde(default)]
    pub ops: usize,
    #[serde(default)]
    pub quantifiers: usize,
    #[serde(default)]
    pub train_instances: usize,
    #[serde(default)]
    pub train_score: Option<f64>,
}

impl Candidate {
    pub fn new(formula: Formula) -> Self {
        let quantifiers = formula.quantifiers.len();
        let ops = formula.core.size();
        Candidate {
            formula,
            ops,
            quantifiers,
            train_instances: 0,
            train_score: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalRow {
    pub formula: String,
    pub ops: usize,
    pub quantifiers: usize,
    pub train_instances: usize,
    pub train_score: Option<f64>,
    pub true_positives: usize,
    pub true_negatives: usize,
    pub total: usize,
    /// Percentage of traces classified correctly.
    pub accuracy: f64,
    pub test_score: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub rows: Vec<EvalRow>,
}

/// Classifies every test trace with every candidate. Candidates mentioning
/// predicates or types the domain lacks are rejected.
pub fn evaluate(
    d: &Domain,
    formulas: &[Candidate],
    test: &ScoredSet,
    opts: CheckOptions,
) -> Result<EvalReport, FtlError> {
    for c in formulas {
        validate(&c.formula, d, opts.strict_types)?;
    }
    let rows = formulas
        .par_iter()
        .map(|c| {
            let sat = satisfied(d, &c.formula, test, opts)?;
            let tp = test
                .traces
                .iter()
                .zip(&sat)
                .filter(|(t, s)| t.is_positive() && **s)
                .count();
            let tn = test
                .traces
                .iter()
                .zip(&sat)
                .filter(|(t, s)| !t.is_positive() && !**s)
                .count();
            let total = test.len();
            Ok(EvalRow {
                formula: c.formula.to_string(),
                ops: c.ops,
                quantifiers: c.quantifiers,
                train_instances: c.train_instances,
                train_score: c.train_score,
                true_positives: tp,
                true_negatives: tn,
                total,
                accuracy: if total == 0 {
                    0.0
                } else {
                    100.0 * (tp + tn) as f64 / total as f64
                },
                test_score: test
                    .traces
                    .iter()
                    .zip(&sat)
                    .filter(|(_, s)| **s)
                    .map(|(t, _)| t.score)
                    .sum(),
            })
        })
        .collect::<Result<Vec<_>, FtlError>>()?;
    Ok(EvalReport { rows })
}

impl EvalReport {
    /// The most accurate row per (ops, quantifiers, training instances),
    /// earlier rows winning ties.
    pub fn best_per_cell(&self) -> BTreeMap<(usize, usize, usize), &EvalRow> {
        let mut out: BTreeMap<(usize, usize, usize), &EvalRow> = BTreeMap::new();
        for r in &self.rows {
            let key = (r.ops, r.quantifiers, r.train_instances);
            match out.get(&key) {
                Some(b) if b.accuracy >= r.accuracy => {}
                _ => {
                    out.insert(key, r);
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r).expect("rows serialize");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
    }

    /// Best accuracy per cell: one row per connector budget, one column per
    /// (training instances, quantifiers) pair.
    pub fn to_markdown(&self) -> String {
        let best = self.best_per_cell();
        let mut cols: Vec<(usize, usize)> = best.keys().map(|k| (k.2, k.1)).collect();
        cols.sort();
        cols.dedup();
        let mut rows: Vec<usize> = best.keys().map(|k| k.0).collect();
        rows.dedup();
        let mut out = String::from("| ops |");
        for (n, q) in &cols {
            let _ = write!(out, " n={n} q={q} |");
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(cols.len()));
        out.push('\n');
        for r in rows {
            let _ = write!(out, "| {r} |");
            for &(n, q) in &cols {
                match best.get(&(r, q, n)) {
                    Some(b) => {
                        let _ = write!(out, " {:.0} |", b.accuracy);
                    }
                    None => out.push_str(" - |"),
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::ftl::{parse_formula, Tl};
    use crate::pddl::{parse_domain, parse_instance, Fluent, State};
    use crate::trace::InstantiatedTrace;

    fn set() -> (Domain, ScoredSet) {
        let d = parse_domain("(define (domain toy) (:predicates (p ?x)))").unwrap();
        let i = Arc::new(
            parse_instance("(define (problem i) (:domain toy) (:objects o))", &d).unwrap(),
        );
        let st = |on: bool| -> Vec<State> {
            vec![if on {
                [Fluent::new("p", ["o"])].into_iter().collect()
            } else {
                State::new()
            }]
        };
        let ts = [(true, 1.0), (true, 1.0), (false, -1.0), (false, -1.0)]
            .iter()
            .enumerate()
            .map(|(k, (on, s))| {
                InstantiatedTrace::new(format!("t{k}"), i.clone(), st(*on), *s).unwrap()
            })
            .collect();
        (d, ScoredSet::new(ts))
    }

    #[test]
    fn accuracy_examples() {
        let (d, ts) = set();
        let perfect = Candidate::new(parse_formula("forall x:object. p(x)", &d).unwrap());
        let top = Candidate::new(Formula::new(vec![], Tl::True));
        let rep = evaluate(&d, &[perfect, top], &ts, CheckOptions::default()).unwrap();
        assert_eq!(rep.rows[0].accuracy, 100.0);
        assert_eq!(rep.rows[1].accuracy, 50.0);
        assert_eq!(rep.rows[0].test_score, 2.0);
        let csv = rep.to_csv();
        assert!(csv.starts_with("formula,ops,quantifiers,train_instances,train_score,"));
        assert!(csv.contains("forall x:object. p(x),0,1,0,,2,2,4,100.0,2.0"));
        let md = rep.to_markdown();
        assert!(md.contains("| 0 | 50 | 100 |"), "{md}");
    }

    #[test]
    fn rejects_foreign_formulas() {
        let (d, ts) = set();
        let other = parse_domain("(define (domain o) (:predicates (z ?x)))").unwrap();
        let f = Candidate::new(parse_formula("forall x:object. z(x)", &other).unwrap());
        assert!(evaluate(&d, &[f], &ts, CheckOptions::default()).is_err());
    }
}
