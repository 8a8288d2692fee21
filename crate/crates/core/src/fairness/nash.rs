use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::concession::{penalty_from_rates, ConcessionModel, Normalizer};
use super::config::{CSetting, ConcessionConfig, AUTO_C_FACTOR};
use crate::benchmarks::{ProblemInstance, ReferenceSet};
use crate::error::{Error, Result};
use crate::metrics::{hv_per_party, igd_per_party, mean, HvReference, HV_REFERENCE_SCALE};
use crate::model::SolutionSet;

/// Per-party loss `L_m` fed into the utilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossMetric {
    /// IGD against the party's sampled front.
    #[default]
    Igd,
    /// `1 - HV_m / V_m`, where `V_m` is the volume of the box between
    /// `f_min` and the HV reference point.
    HvComplement,
}

/// `max(0, C - (L_m + λ_m pen_m))` per party.
pub fn utilities(losses: &[f64], penalties: &[f64], lambda: &[f64], c: f64) -> Result<Vec<f64>> {
    if losses.len() != penalties.len() || losses.len() != lambda.len() {
        return Err(Error::contract("losses, penalties and weights differ in length"));
    }
    Ok(penalized_losses(losses, penalties, lambda).iter().map(|l| (c - l).max(0.0)).collect())
}

fn penalized_losses(losses: &[f64], penalties: &[f64], lambda: &[f64]) -> Vec<f64> {
    losses.iter().zip(penalties).zip(lambda).map(|((l, p), w)| l + w * p).collect()
}

pub fn nash_product(utilities: &[f64]) -> f64 {
    utilities.iter().product()
}

/// `Σ ln u_m`; negative infinity as soon as one utility is zero.
pub fn log_nash_product(utilities: &[f64]) -> f64 {
    if utilities.iter().any(|u| *u <= 0.0) {
        return f64::NEG_INFINITY;
    }
    utilities.iter().map(|u| u.ln()).sum()
}

/// Resolves `C` for a comparison group given each set's penalized losses.
pub fn resolve_c(setting: CSetting, penalized: &[Vec<f64>]) -> Result<f64> {
    match setting {
        CSetting::Fixed(c) => Ok(c),
        CSetting::Auto => {
            let worst = penalized.iter().flatten().copied().fold(0.0_f64, f64::max);
            if !(worst > 0.0) || !worst.is_finite() {
                return Err(Error::config(
                    "cannot resolve C automatically: every penalized loss in the group is zero; set C to a positive number",
                ));
            }
            Ok(AUTO_C_FACTOR * worst)
        }
    }
}

/// Serializes non-finite values as strings ("-inf", "inf", "nan").
pub mod extended_f64 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(v),
            Raw::Text(t) => match t.as_str() {
                "-inf" => Ok(f64::NEG_INFINITY),
                "inf" => Ok(f64::INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("not a number: {:?}", t))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartyReport {
    pub party: usize,
    pub igd: f64,
    pub hv: f64,
    pub loss: f64,
    pub penalty: f64,
    pub penalized_loss: f64,
    pub utility: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// The resolved configuration.
    pub config: ConcessionConfig,
    pub c: f64,
    pub c_auto: bool,
    pub loss_metric: LossMetric,
    pub reference_density: usize,
    pub bounds_source: String,
    pub hv_reference: HvReference,
    pub normalizers: Vec<Normalizer>,
    pub population_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub parties: Vec<PartyReport>,
    pub psi_np: f64,
    #[serde(with = "extended_f64")]
    pub log_psi_np: f64,
    pub mean_igd: f64,
    pub mean_hv: f64,
    pub provenance: Provenance,
}

impl EvaluationReport {
    pub fn utilities(&self) -> Vec<f64> {
        self.parties.iter().map(|p| p.utility).collect()
    }
}

/// Losses and penalties of one candidate set, before `C` is known.
#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub igd: Vec<f64>,
    pub hv: Vec<f64>,
    pub losses: Vec<f64>,
    pub penalties: Vec<f64>,
    pub population_size: usize,
}

/// Scores candidate sets of one problem against its reference set.
#[derive(Debug, Clone)]
pub struct FairnessEvaluator {
    reference: ReferenceSet,
    model: ConcessionModel,
    hv_reference: HvReference,
    loss: LossMetric,
}

impl FairnessEvaluator {
    pub fn new(problem: &ProblemInstance, reference: &ReferenceSet) -> Result<Self> {
        Ok(Self {
            model: ConcessionModel::new(problem, reference)?,
            reference: reference.clone(),
            hv_reference: HvReference::from_reference(reference, HV_REFERENCE_SCALE),
            loss: LossMetric::Igd,
        })
    }

    pub fn with_loss(mut self, loss: LossMetric) -> Self {
        self.loss = loss;
        self
    }

    pub fn with_hv_reference(mut self, hv_reference: HvReference) -> Result<Self> {
        if hv_reference.points.len() != self.reference.num_parties() {
            return Err(Error::config("HV reference must give one point per party"));
        }
        self.hv_reference = hv_reference;
        Ok(self)
    }

    pub fn model(&self) -> &ConcessionModel {
        &self.model
    }

    pub fn reference(&self) -> &ReferenceSet {
        &self.reference
    }

    pub fn num_parties(&self) -> usize {
        self.reference.num_parties()
    }

    pub fn assess(&self, pop: &SolutionSet, config: &ConcessionConfig) -> Result<Assessment> {
        pop.require_non_empty()?;
        let config = config.resolve(self.num_parties())?;
        let igd = igd_per_party(&self.reference, pop)?;
        let hv = hv_per_party(pop, &self.hv_reference)?;
        let losses = match self.loss {
            LossMetric::Igd => igd.clone(),
            LossMetric::HvComplement => hv
                .iter()
                .enumerate()
                .map(|(m, h)| {
                    let lo = &self.reference.party(m).f_min;
                    let volume: f64 = self.hv_reference.points[m].iter().zip(lo).map(|(r, l)| r - l).product();
                    1.0 - h / volume
                })
                .collect(),
        };
        let rates = self.model.rates_many(pop)?;
        let penalties = penalty_from_rates(&rates, &config.gamma_hat);
        Ok(Assessment { igd, hv, losses, penalties, population_size: pop.len() })
    }

    /// Scores one set on its own; an automatic `C` is resolved from this set alone.
    pub fn evaluate(&self, pop: &SolutionSet, config: &ConcessionConfig) -> Result<EvaluationReport> {
        Ok(self.evaluate_group(std::slice::from_ref(pop), config)?.remove(0))
    }

    /// Scores a comparison group with one shared `C`.
    pub fn evaluate_group(&self, pops: &[SolutionSet], config: &ConcessionConfig) -> Result<Vec<EvaluationReport>> {
        if pops.is_empty() {
            return Err(Error::contract("comparison group is empty"));
        }
        let resolved = config.resolve(self.num_parties())?;
        let assessments: Vec<Assessment> = pops.iter().map(|p| self.assess(p, &resolved)).collect::<Result<_>>()?;
        self.score_assessments(&assessments, &resolved)
    }

    /// Turns precomputed assessments into reports with one shared `C`.
    pub fn score_assessments(
        &self,
        assessments: &[Assessment],
        config: &ConcessionConfig,
    ) -> Result<Vec<EvaluationReport>> {
        let config = config.resolve(self.num_parties())?;
        let penalized: Vec<Vec<f64>> =
            assessments.iter().map(|a| penalized_losses(&a.losses, &a.penalties, &config.lambda)).collect();
        let c = resolve_c(config.c, &penalized)?;
        assessments
            .iter()
            .zip(&penalized)
            .map(|(a, pl)| {
                let u = utilities(&a.losses, &a.penalties, &config.lambda, c)?;
                let parties = (0..a.losses.len())
                    .map(|m| PartyReport {
                        party: self.reference.party(m).party,
                        igd: a.igd[m],
                        hv: a.hv[m],
                        loss: a.losses[m],
                        penalty: a.penalties[m],
                        penalized_loss: pl[m],
                        utility: u[m],
                    })
                    .collect();
                Ok(EvaluationReport {
                    parties,
                    psi_np: nash_product(&u),
                    log_psi_np: log_nash_product(&u),
                    mean_igd: mean(&a.igd),
                    mean_hv: mean(&a.hv),
                    provenance: Provenance {
                        config: config.clone(),
                        c,
                        c_auto: config.c == CSetting::Auto,
                        loss_metric: self.loss,
                        reference_density: self.reference.density,
                        bounds_source: self.reference.bounds_source.clone(),
                        hv_reference: self.hv_reference.clone(),
                        normalizers: self.model.normalizers(),
                        population_size: a.population_size,
                    },
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::MpdmpSpec;
    use proptest::prelude::*;

    #[test]
    fn zero_losses_fixed_c() {
        let u = utilities(&[0.0, 0.0], &[0.0, 0.0], &[10.0, 10.0], 10.0).unwrap();
        assert_eq!(nash_product(&u), 100.0);
        assert!((log_nash_product(&u) - 100f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn balanced_beats_unbalanced_at_equal_sum() {
        assert!(nash_product(&[5.0, 5.0]) > nash_product(&[8.0, 2.0]));
        assert_eq!(nash_product(&[8.0, 2.0]), 16.0);
    }

    #[test]
    fn utilities_clamp_and_log_sentinel() {
        let u = utilities(&[1.0, 20.0], &[0.0, 0.0], &[1.0, 1.0], 10.0).unwrap();
        assert_eq!(u, vec![9.0, 0.0]);
        assert_eq!(nash_product(&u), 0.0);
        assert_eq!(log_nash_product(&u), f64::NEG_INFINITY);
    }

    #[test]
    fn auto_c_uses_group_maximum() {
        let c = resolve_c(CSetting::Auto, &[vec![1.0, 2.0], vec![4.0, 0.5]]).unwrap();
        assert!((c - 4.4).abs() < 1e-12);
        assert!(resolve_c(CSetting::Auto, &[vec![0.0, 0.0]]).is_err());
        assert_eq!(resolve_c(CSetting::Fixed(3.0), &[vec![9.0]]).unwrap(), 3.0);
    }

    #[test]
    fn report_serializes_infinite_log() {
        let spec = MpdmpSpec::case1();
        let problem = spec.to_problem().unwrap();
        let reference = spec.sample_reference(51).unwrap();
        let eval = FairnessEvaluator::new(&problem, &reference).unwrap();
        let pop = problem.evaluate_many(&[vec![2.0, 2.0], vec![9.0, 9.0]]).unwrap();
        let cfg = ConcessionConfig::new(vec![0.0, 0.0], vec![], CSetting::Fixed(0.1));
        let report = eval.evaluate(&pop, &cfg).unwrap();
        assert_eq!(report.psi_np, 0.0);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["log_psi_np"], "-inf");
        assert_eq!(json["provenance"]["config"]["C"], 0.1);
        let back: EvaluationReport = serde_json::from_value(json).unwrap();
        assert_eq!(back.log_psi_np, f64::NEG_INFINITY);
    }

    #[test]
    fn report_matches_components() {
        let spec = MpdmpSpec::case2();
        let problem = spec.to_problem().unwrap();
        let reference = spec.sample_reference(101).unwrap();
        let eval = FairnessEvaluator::new(&problem, &reference).unwrap();
        let pop = problem.evaluate_many(&[vec![3.0, 2.0], vec![2.0, 1.5], vec![4.0, 2.0]]).unwrap();
        let cfg = ConcessionConfig::uniform(2, 0.1);
        let report = eval.evaluate(&pop, &cfg).unwrap();
        let igd = igd_per_party(&reference, &pop).unwrap();
        let pen = eval.model().penalty(&pop, &cfg).unwrap();
        let worst = (0..2).map(|m| igd[m] + 10.0 * pen[m]).fold(0.0, f64::max);
        assert!((report.provenance.c - 1.1 * worst).abs() < 1e-12);
        for (m, p) in report.parties.iter().enumerate() {
            assert_eq!(p.loss, igd[m]);
            assert_eq!(p.penalty, pen[m]);
            assert!((p.utility - (report.provenance.c - igd[m] - 10.0 * pen[m])).abs() < 1e-12);
        }
        assert_eq!(report.psi_np, report.parties.iter().map(|p| p.utility).product::<f64>());
    }

    #[test]
    fn hv_complement_loss_is_in_unit_interval() {
        let spec = MpdmpSpec::case2();
        let problem = spec.to_problem().unwrap();
        let reference = spec.sample_reference(101).unwrap();
        let eval = FairnessEvaluator::new(&problem, &reference).unwrap().with_loss(LossMetric::HvComplement);
        let pop = problem.evaluate_many(&[vec![3.0, 2.0], vec![2.0, 1.5]]).unwrap();
        let a = eval.assess(&pop, &ConcessionConfig::default()).unwrap();
        assert!(a.losses.iter().all(|l| (0.0..1.0).contains(l)));
    }

    #[test]
    fn threshold_monotonicity_on_fixed_set() {
        let spec = MpdmpSpec::case1();
        let problem = spec.to_problem().unwrap();
        let reference = spec.sample_reference(101).unwrap();
        let eval = FairnessEvaluator::new(&problem, &reference).unwrap();
        let pop = problem.evaluate_many(&[vec![2.0, 2.0], vec![3.0, 1.5], vec![4.0, 2.0]]).unwrap();
        let max_rate = eval.model().rates_many(&pop).unwrap().iter().flatten().copied().fold(0.0, f64::max);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let scores: Vec<f64> = grid
            .iter()
            .map(|g| {
                eval.evaluate(&pop, &ConcessionConfig::new(vec![*g, *g], vec![], CSetting::Fixed(50.0))).unwrap().psi_np
            })
            .collect();
        for (w, g) in scores.windows(2).zip(&grid[1..]) {
            assert!(w[1] >= w[0]);
            if *g >= max_rate && g - 0.05 >= max_rate {
                assert_eq!(w[1], w[0]);
            }
        }
    }

    proptest! {
        #[test]
        fn pareto_monotone_in_utilities(u in proptest::collection::vec(0.01f64..100.0, 1..6), bump in 0.001f64..5.0, pick in 0usize..6) {
            let mut v = u.clone();
            let i = pick % v.len();
            v[i] += bump;
            prop_assert!(nash_product(&v) > nash_product(&u));
        }

        #[test]
        fn contraction_is_preferred(a in 0.1f64..50.0, b in 0.1f64..50.0, t in 0.01f64..0.99) {
            prop_assume!((a - b).abs() > 1e-6);
            let shift = t * (a - b) / 2.0;
            prop_assert!(nash_product(&[a - shift, b + shift]) > nash_product(&[a, b]));
        }

        #[test]
        fn comparative_scaling_invariance(rows in proptest::collection::vec(proptest::collection::vec(0.1f64..10.0, 3), 1..6), k in 0.1f64..10.0) {
            let base = super::super::comparative_nash(&rows).unwrap();
            let scaled: Vec<Vec<f64>> = rows.iter().map(|r| vec![r[0] * k, r[1], r[2]]).collect();
            let other = super::super::comparative_nash(&scaled).unwrap();
            for (x, y) in base.iter().zip(other) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }
}
