//! Classical per-party indicators and their mean aggregates.

mod hv;
mod igd;

pub use hv::hypervolume;
pub use igd::{igd, igd_multiparty, igd_party};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::benchmarks::ReferenceSet;
use crate::error::{Error, Result};
use crate::model::{fmt_f64, SolutionSet};

/// Default scale applied to `f_max` when deriving HV reference points.
pub const HV_REFERENCE_SCALE: f64 = 1.1;

/// Per-party hypervolume reference points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvReference {
    pub points: Vec<Vec<f64>>,
}

impl HvReference {
    /// `scale * f_max` per objective, from a reference set.
    pub fn from_reference(reference: &ReferenceSet, scale: f64) -> Self {
        Self { points: reference.parties.iter().map(|p| p.f_max.iter().map(|v| v * scale).collect()).collect() }
    }
}

pub fn hv_party(pop: &SolutionSet, reference: &HvReference, party: usize) -> Result<f64> {
    pop.require_non_empty()?;
    let r = reference
        .points
        .get(party)
        .ok_or_else(|| Error::contract(format!("no HV reference for party position {}", party)))?;
    let images: Vec<&[f64]> = pop
        .iter()
        .map(|s| {
            s.objectives
                .get(party)
                .map(|b| b.values.as_slice())
                .ok_or_else(|| Error::contract(format!("solution has no block for party position {}", party)))
        })
        .collect::<Result<_>>()?;
    hypervolume(&images, r)
}

/// Per-party IGD values against each party's sampled front.
pub fn igd_per_party(reference: &ReferenceSet, pop: &SolutionSet) -> Result<Vec<f64>> {
    (0..reference.num_parties()).map(|m| igd_party(&reference.party(m).pf_samples, pop, m)).collect()
}

pub fn hv_per_party(pop: &SolutionSet, reference: &HvReference) -> Result<Vec<f64>> {
    (0..reference.points.len()).map(|m| hv_party(pop, reference, m)).collect()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn mean_igd(reference: &ReferenceSet, pop: &SolutionSet) -> Result<f64> {
    Ok(mean(&igd_per_party(reference, pop)?))
}

pub fn mean_hv(pop: &SolutionSet, reference: &HvReference) -> Result<f64> {
    Ok(mean(&hv_per_party(pop, reference)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricScope {
    Party(usize),
    Aggregate,
}

impl std::fmt::Display for MetricScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricScope::Party(p) => write!(f, "party{}", p),
            MetricScope::Aggregate => f.write_str("aggregate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub name: String,
    pub scope: MetricScope,
    pub value: f64,
}

/// One row of the long-format metric report.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub problem: String,
    pub algorithm: String,
    pub run: usize,
    pub metric: MetricValue,
}

pub const METRIC_REPORT_HEADER: [&str; 6] = ["problem", "algorithm", "run", "metric", "scope", "value"];

/// Writes `problem, algorithm, run, metric, scope, value` rows.
pub fn write_metric_report<W: Write>(rows: &[MetricRow], writer: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(METRIC_REPORT_HEADER)?;
    for r in rows {
        out.write_record([
            r.problem.clone(),
            r.algorithm.clone(),
            r.run.to_string(),
            r.metric.name.clone(),
            r.metric.scope.to_string(),
            fmt_f64(r.metric.value),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::MpdmpSpec;

    #[test]
    fn mean_of_party_values() {
        assert!((mean(&[0.1, 0.3]) - 0.2).abs() < 1e-16);
        assert_eq!(mean(&[0.7]), 0.7);
    }

    #[test]
    fn mean_metrics_are_party_permutation_invariant() {
        let spec = MpdmpSpec::case2();
        let reference = spec.sample_reference(50).unwrap();
        let problem = spec.to_problem().unwrap();
        let pop = problem.evaluate_many(&[vec![3.0, 2.0], vec![2.0, 1.5], vec![4.0, 2.5]]).unwrap();
        let hv_ref = HvReference::from_reference(&reference, HV_REFERENCE_SCALE);

        let swapped_spec =
            MpdmpSpec::new("swapped", vec![spec.parties[1].targets.clone(), spec.parties[0].targets.clone()]);
        let swapped_ref = swapped_spec.sample_reference(50).unwrap();
        let swapped_pop = swapped_spec
            .to_problem()
            .unwrap()
            .evaluate_many(&[vec![3.0, 2.0], vec![2.0, 1.5], vec![4.0, 2.5]])
            .unwrap();
        let swapped_hv = HvReference::from_reference(&swapped_ref, HV_REFERENCE_SCALE);

        let a = mean_igd(&reference, &pop).unwrap();
        let b = mean_igd(&swapped_ref, &swapped_pop).unwrap();
        assert!((a - b).abs() < 1e-12);
        let a = mean_hv(&pop, &hv_ref).unwrap();
        let b = mean_hv(&swapped_pop, &swapped_hv).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn report_has_documented_header() {
        let rows = vec![MetricRow {
            problem: "case1".into(),
            algorithm: "opt_all".into(),
            run: 0,
            metric: MetricValue { name: "igd".into(), scope: MetricScope::Party(1), value: 0.5 },
        }];
        let mut buf = Vec::new();
        write_metric_report(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "problem,algorithm,run,metric,scope,value");
        assert_eq!(lines.next().unwrap(), "case1,opt_all,0,igd,party1,5.0000000000000000e-1");
    }
}
