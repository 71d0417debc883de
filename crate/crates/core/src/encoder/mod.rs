//! Compilation of one shape configuration and a scored trace set into
//! weighted partial CNF, and decoding of solver models back into formulas.

mod decode;
mod encode;
mod exactly_one;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ftl::{BinaryOp, CheckOptions, UnaryOp, DEFAULT_CHECK_CAP};

pub use decode::{decode, var_name, DecodeError};
pub use encode::{encode, Census, SlotValue, VarMap};
pub use exactly_one::{exactly_one, exactly_one_clauses, PAIRWISE_LIMIT};

/// A label for a connector node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connector {
    Un(UnaryOp),
    Bin(BinaryOp),
}

impl Connector {
    pub fn is_binary(self) -> bool {
        matches!(self, Connector::Bin(_))
    }

    pub fn name(self) -> &'static str {
        match self {
            Connector::Bin(BinaryOp::And) => "and",
            Connector::Bin(BinaryOp::Or) => "or",
            Connector::Bin(BinaryOp::Implies) => "implies",
            Connector::Bin(BinaryOp::Until) => "until",
            Connector::Un(UnaryOp::Not) => "not",
            Connector::Un(UnaryOp::Next) => "next",
            Connector::Un(UnaryOp::Eventually) => "eventually",
            Connector::Un(UnaryOp::Always) => "always",
            Connector::Un(UnaryOp::Yesterday) => "yesterday",
            Connector::Un(UnaryOp::Once) => "once",
            Connector::Un(UnaryOp::Historically) => "historically",
        }
    }
}

impl fmt::Display for Connector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Connector {
    type Err = EncodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        default_alphabet()
            .into_iter()
            .find(|c| {
                let sym = match c {
                    Connector::Un(op) => op.ascii(),
                    Connector::Bin(op) => op.ascii(),
                };
                c.name() == t.to_ascii_lowercase() || sym == t
            })
            .ok_or_else(|| EncodeError::UnknownConnector(t.to_string()))
    }
}

/// `∧ ∨ ⇒ U ¬ ○ ◇ □ Y O H`.
pub fn default_alphabet() -> Vec<Connector> {
    let mut v: Vec<Connector> = BinaryOp::ALL.iter().map(|&b| Connector::Bin(b)).collect();
    v.extend(UnaryOp::ALL.iter().map(|&u| Connector::Un(u)));
    v
}

/// Parses a comma-separated list of connector names or ASCII symbols.
pub fn parse_alphabet(text: &str) -> Result<Vec<Connector>, EncodeError> {
    let mut out: Vec<Connector> = Vec::new();
    for part in text.split(',').filter(|p| !p.trim().is_empty()) {
        let c: Connector = part.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(EncodeError::UnknownConnector(text.to_string()));
    }
    out.sort();
    Ok(out)
}

/// How temporal connectors over position ranges are encoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemporalEncoding {
    /// Through the value at the neighbouring position, e.g.
    /// `◇φ(k) ⇔ φ(k) ∨ ◇φ(k+1)`.
    #[default]
    Recursive,
    /// Through the whole range, e.g. `◇φ(k) ⇔ ⋁_{k' ≥ k} φ(k')`, with a named
    /// conjunction per (start, end) pair for `U`.
    Expanded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeOptions {
    pub alphabet: Vec<Connector>,
    pub strict_types: bool,
    /// Only universally quantified variables may fill atom slots.
    pub strict_eq4: bool,
    pub temporal: TemporalEncoding,
    /// Scores are multiplied by `10^scale_digits` before rounding.
    pub scale_digits: u32,
    /// Maximum number of (environment, position) pairs over all traces.
    pub env_cap: u64,
    /// Among equally scored formulas, prefer fewer binary connectors.
    pub tie_break: bool,
    /// Constraint families to leave out. Only meant for testing that each
    /// family is needed.
    #[doc(hidden)]
    pub ablate: Vec<Family>,
}

/// Groups of hard clauses emitted by the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    ExactlyOne,
    Types,
    Satisfaction,
    Atoms,
    Connectors,
    Discrimination,
    Redundancy,
    Visibility,
}

impl Default for EncodeOptions {
    fn default() -> Self {
        EncodeOptions {
            alphabet: default_alphabet(),
            strict_types: false,
            strict_eq4: false,
            temporal: TemporalEncoding::default(),
            scale_digits: 0,
            env_cap: DEFAULT_CHECK_CAP,
            tie_break: true,
            ablate: Vec::new(),
        }
    }
}

impl EncodeOptions {
    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            strict_types: self.strict_types,
            cap: self.env_cap,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EncodeError {
    #[error("no positive trace (score >= 0) to learn from")]
    NoPositive,
    #[error("no negative trace (score < 0) to learn from")]
    NoNegative,
    /// The configuration admits no well-formed formula.
    #[error("configuration is infeasible: {0}")]
    Infeasible(String),
    #[error("encoding needs {needed} environment-position pairs, cap is {cap}")]
    EnvCap { needed: u64, cap: u64 },
    #[error("exactly-one over an empty set")]
    EmptyExactlyOne,
    #[error("unknown connector `{0}`")]
    UnknownConnector(String),
    #[error("score {0} does not fit the integer weight range")]
    Weight(f64),
}

/// Rounds `score * 10^digits` half to even.
pub fn scale_score(score: f64, digits: u32) -> Result<i64, EncodeError> {
    let x = (score * 10f64.powi(digits as i32)).round_ties_even();
    if !x.is_finite() || x.abs() > (1u64 << 52) as f64 {
        return Err(EncodeError::Weight(score));
    }
    Ok(x as i64)
}

#[cfg(test)]
mod tests;
