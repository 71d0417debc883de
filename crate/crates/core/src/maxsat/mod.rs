//! Weighted partial MaxSAT by linear SAT-UNSAT search over an embedded CDCL
//! solver, plus DIMACS WCNF interchange and an external-solver adapter.

mod dimacs;
mod sat;
mod totalizer;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::cnf::{Lit, Wcnf};

pub use dimacs::{export_wcnf, import_model, parse_wcnf, solve_external, DimacsError};
pub use sat::{SatResult, SatSolver};

/// Resource limits, checked cooperatively.
#[derive(Debug, Clone, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub conflicts: Option<u64>,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn exhausted(&self, conflicts: u64) -> bool {
        self.conflicts.is_some_and(|c| conflicts >= c)
            || self.deadline.is_some_and(|d| Instant::now() >= d)
            || self
                .cancel
                .as_ref()
                .is_some_and(|c| c.load(Ordering::Relaxed))
    }

    fn minus(&self, used: u64) -> Budget {
        Budget {
            conflicts: self.conflicts.map(|c| c.saturating_sub(used)),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimum,
    /// The budget ran out after a model was found; the cost is an upper bound.
    SatisfiableBounded,
    Unsatisfiable,
    /// The budget ran out before any model was found.
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: Status,
    pub model: Option<Vec<bool>>,
    pub cost: Option<u64>,
}

impl Outcome {
    fn without_model(status: Status) -> Self {
        Outcome {
            status,
            model: None,
            cost: None,
        }
    }
}

/// Minimizes the weight of falsified soft clauses subject to the hard ones.
pub fn solve(w: &Wcnf, budget: &Budget) -> Outcome {
    let mut s = SatSolver::new();
    s.reserve_vars(w.num_vars);
    for c in &w.hard {
        if !s.add_clause(c) {
            return Outcome::without_model(Status::Unsatisfiable);
        }
    }
    let mut relax: Vec<(Lit, u64)> = Vec::with_capacity(w.soft.len());
    for (c, weight) in &w.soft {
        if c.len() == 1 {
            relax.push((!c[0], *weight));
        } else {
            let b = s.new_var();
            let mut clause = c.clone();
            clause.push(b);
            s.add_clause(&clause);
            relax.push((b, *weight));
        }
    }
    let n = w.num_vars as usize;
    let take_model = |s: &SatSolver| -> Vec<bool> {
        let m = s.model()[..n].to_vec();
        assert!(
            w.satisfies_hard(&m),
            "solver returned a model violating a hard clause"
        );
        m
    };
    match s.solve(budget) {
        SatResult::Unsat => return Outcome::without_model(Status::Unsatisfiable),
        SatResult::Unknown => return Outcome::without_model(Status::Timeout),
        SatResult::Sat => {}
    }
    let mut best = take_model(&s);
    let mut best_cost = w.cost(&best);
    let finish = |status, model, cost| Outcome {
        status,
        model: Some(model),
        cost: Some(cost),
    };
    if best_cost == 0 {
        return finish(Status::Optimum, best, 0);
    }
    let outputs = totalizer::build(&mut s, &relax, best_cost);
    loop {
        let mut consistent = true;
        for &(v, l) in &outputs {
            if v >= best_cost {
                consistent &= s.add_clause(&[!l]);
            }
        }
        if !consistent {
            return finish(Status::Optimum, best, best_cost);
        }
        match s.solve(&budget.minus(s.conflicts)) {
            SatResult::Unsat => return finish(Status::Optimum, best, best_cost),
            SatResult::Unknown => return finish(Status::SatisfiableBounded, best, best_cost),
            SatResult::Sat => {
                let m = take_model(&s);
                let c = w.cost(&m);
                debug_assert!(c < best_cost);
                best = m;
                best_cost = c;
                if c == 0 {
                    return finish(Status::Optimum, best, 0);
                }
            }
        }
    }
}
