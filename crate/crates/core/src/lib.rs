//! Fairness-aware evaluation of solution sets for multi-party multi-objective
//! optimization.
//!
//! Each decision maker (party) judges a candidate set through its own loss
//! metric. The evaluator turns those losses, plus a penalty for solutions
//! outside the parties' mutually acceptable region, into utilities and scores
//! the set by their product. Around that core the crate provides the MPDMP
//! benchmark family with analytic reference sets, classical IGD/HV indicators,
//! two NSGA-II-based baseline optimizers and an experiment harness.
//!
//! The `parallel` feature (on by default) runs batch work on rayon; without it
//! everything runs sequentially with identical results.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod benchmarks;
mod error;
pub mod fairness;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod par;
pub mod rng;

#[cfg(test)]
mod oracles;

pub use error::{Error, Result};
