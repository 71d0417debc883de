//! Learning first-order temporal logic classifiers from planning traces.

pub mod bench;
pub mod cnf;
pub mod encoder;
pub mod ftl;
pub mod learner;
pub mod maxsat;
pub mod pddl;
pub mod preprocess;
pub mod shapes;
pub mod trace;
