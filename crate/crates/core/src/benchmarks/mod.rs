//! Benchmark problems: the built-in MPDMP family and a registry for
//! externally defined problems.

pub mod mpdmp;
mod problem;
mod registry;

pub use mpdmp::{MpdmpParty, MpdmpSpec, DEFAULT_DENSITY};
pub use problem::{
    estimate_objective_bounds, Evaluator, PartyReference, ProblemInstance, ReferenceSet, BOUNDS_SAMPLE_SIZE,
};
pub use registry::{ProblemHandle, ProblemRegistry, RegisteredProblem};
