//! Evaluation reports, the Set Cover task generator and the exhaustive
//! search oracle.

mod brute;
mod eval;
mod setcover;

pub use brute::{
    brute_force_best, count_labelings, enumerate_formulas, BruteError, BruteForce,
    DEFAULT_SPACE_BOUND,
};
pub use eval::{evaluate, Candidate, EvalReport, EvalRow};
pub use setcover::{
    cover_formula, gen_setcover_instance, min_cover, set_object, set_type, SetCoverError,
    SetCoverTask,
};
