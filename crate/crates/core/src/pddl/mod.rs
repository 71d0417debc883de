//! Typed STRIPS PDDL: model, parser, serializer and state transitions.

mod model;
mod parse;
pub mod sexpr;
mod write;

use thiserror::Error;

pub use model::{
    applicable, apply, subtype_of, ActionSchema, Atom, Domain, Fluent, Instance, Operator,
    Predicate, State, TypeId, TypeTree, ROOT_TYPE,
};
pub use parse::{parse_action_call, parse_domain, parse_instance, parse_plan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PddlError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("undeclared type `{0}`")]
    UndeclaredType(String),
    #[error("duplicate predicate `{0}`")]
    DuplicatePredicate(String),
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown action schema `{0}`")]
    UnknownSchema(String),
    #[error("`{symbol}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("unsupported PDDL feature: {0}")]
    Unsupported(String),
    #[error("operator {0} is not applicable")]
    NotApplicable(String),
    #[error("{0}")]
    Invalid(String),
}
