//! Literals and weighted partial CNF.

use std::fmt;
use std::ops::Not;

/// A literal: variable index (0-based) and sign packed as `2 * var + neg`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: u32, positive: bool) -> Lit {
        Lit(2 * var + u32::from(!positive))
    }

    pub fn pos(var: u32) -> Lit {
        Lit::new(var, true)
    }

    pub fn var(self) -> u32 {
        self.0 >> 1
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense index, suitable for per-literal tables.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var()) + 1;
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn from_dimacs(x: i64) -> Lit {
        assert!(x != 0, "0 is not a DIMACS literal");
        Lit::new((x.unsigned_abs() - 1) as u32, x > 0)
    }

    /// Truth value under a total assignment indexed by variable.
    pub fn eval(self, model: &[bool]) -> bool {
        model[self.var() as usize] == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Weighted partial CNF. Soft clause weights are at least 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Wcnf {
    pub num_vars: u32,
    pub hard: Vec<Vec<Lit>>,
    pub soft: Vec<(Vec<Lit>, u64)>,
}

impl Wcnf {
    pub fn new() -> Self {
        Wcnf::default()
    }

    pub fn new_var(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::pos(self.num_vars - 1)
    }

    pub fn add_hard(&mut self, clause: impl Into<Vec<Lit>>) {
        self.hard.push(clause.into());
    }

    pub fn add_soft(&mut self, clause: impl Into<Vec<Lit>>, weight: u64) {
        assert!(weight >= 1, "soft clause weights must be positive");
        self.soft.push((clause.into(), weight));
    }

    /// Weight that marks hard clauses in DIMACS WCNF.
    pub fn top(&self) -> u64 {
        self.soft.iter().map(|(_, w)| *w).sum::<u64>() + 1
    }

    pub fn satisfies_hard(&self, model: &[bool]) -> bool {
        self.hard.iter().all(|c| c.iter().any(|l| l.eval(model)))
    }

    /// Total weight of the soft clauses falsified by `model`.
    pub fn cost(&self, model: &[bool]) -> u64 {
        self.soft
            .iter()
            .filter(|(c, _)| !c.iter().any(|l| l.eval(model)))
            .map(|(_, w)| *w)
            .sum()
    }
}
