//! Concession rates, non-consensus penalties and the Nash-product score.
//!
//! A candidate set is scored by `Π_m max(0, C - (L_m + λ_m L_m^pen))`, where
//! `L_m` is party `m`'s loss (IGD by default) and `L_m^pen` sums, over the
//! set, how far each solution's concession rate exceeds the party's
//! threshold.

mod bound;
mod comparative;
mod concession;
mod config;
mod nash;

pub use bound::lambda_sufficiency_bound;
pub use comparative::comparative_nash;
pub use concession::{
    deviation, normalizer, penalty_from_rates, violation, ConcessionEntry, ConcessionModel, ConcessionProfile,
    Membership, MembershipMode, Normalizer, DEGENERATE_NORMALIZER,
};
pub use config::{CSetting, ConcessionConfig, AUTO_C_FACTOR, DEFAULT_LAMBDA};
pub use nash::{
    extended_f64, log_nash_product, nash_product, resolve_c, utilities, Assessment, EvaluationReport,
    FairnessEvaluator, LossMetric, PartyReport, Provenance,
};
