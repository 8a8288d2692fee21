//! Experiment harness: batch runs, concession sweeps, axiom checks and
//! plot-data export.
//!
//! Every random draw comes from a stream keyed by the master seed and the
//! identity of the cell or trial, and every parallel map collects in input
//! order, so outputs are byte-identical for a given plan and seed regardless
//! of the worker count.

mod axioms;
mod emit;
mod experiment;
mod plan;
pub mod stats;
mod sweep;

use std::path::PathBuf;

pub use axioms::{run_axiom_suite, AxiomOptions, AxiomOutcome, AxiomReport, MIN_SWAP_WEIGHT, SYMMETRY_TOLERANCE};
pub use emit::{
    emit_plot_data, read_grid_csv, write_grid_csv, write_table_csv, EmitFormat, GridTriples, PlotSource, GRID_HEADER,
    TABLE_HEADER,
};
pub use experiment::{
    config_hash, run_experiment, run_seed, verify_summary, write_experiment, CellFailure, ExperimentResult,
    GroupConstant, PopulationRecord, RunRecord, SummaryRow, RUNS_HEADER, SUMMARY_HEADER,
};
pub use plan::{ExperimentPlan, MetricKind};
pub use sweep::{
    candidate_pool, check_monotonicity, run_sweep, sweep_problem, Axis, CandidatePool, PoolConfig, SweepGrid, SweepPlan,
};

use crate::error::{Error, Result};

/// Overrides the output directory.
pub const ENV_OUTPUT_DIR: &str = "MPFAIR_OUTPUT_DIR";
/// Overrides the worker count.
pub const ENV_WORKERS: &str = "MPFAIR_WORKERS";

/// Output directory and worker count from the environment, if set.
pub fn env_overrides() -> Result<(Option<PathBuf>, Option<usize>)> {
    let dir = std::env::var_os(ENV_OUTPUT_DIR).filter(|v| !v.is_empty()).map(PathBuf::from);
    let workers = match std::env::var(ENV_WORKERS) {
        Ok(v) if !v.trim().is_empty() => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n > 0)
                .ok_or_else(|| Error::config(format!("{} must be a positive integer, got {:?}", ENV_WORKERS, v)))?,
        ),
        _ => None,
    };
    Ok((dir, workers))
}
