//! First-order temporal formulas over finite traces: syntax, parsing,
//! printing and model checking.

mod ast;
mod check;
mod parse;

use thiserror::Error;

pub use ast::{BinaryOp, Formula, QuantKind, Quantifier, Tl, UnaryOp};
pub use check::{
    check_tl, eval_positions, holds, quantifier_domains, satisfied, score, CheckOptions,
    Environment, DEFAULT_CHECK_CAP,
};
pub use parse::{parse_formula, parse_syntax, validate};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FtlError {
    #[error("syntax error at offset {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("quantifiers must precede the temporal part")]
    NonPrenex,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` is quantified twice")]
    DuplicateVariable(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("`{predicate}` expects {expected} arguments, found {found}")]
    Arity {
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("type of `{variable}` does not fit its slot in `{predicate}`")]
    TypeMismatch { variable: String, predicate: String },
    #[error("model checking needs {checks} environment-position checks, cap is {cap}")]
    ResourceLimit { checks: u64, cap: u64 },
}
