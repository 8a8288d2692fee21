//! Concession rates, the mutually acceptable region and non-consensus
//! penalties.
//!
//! For party `m`, the deviation of `x` from the party's Pareto set is the
//! smallest (over sampled Pareto points `y`) of the largest normalized
//! objective excess of `x` over `y`. The concession rate divides that by the
//! largest deviation any other party's Pareto point incurs against `m`.

use serde::{Deserialize, Serialize};

use super::config::ConcessionConfig;
use crate::benchmarks::{ProblemInstance, ReferenceSet};
use crate::error::{Error, Result};
use crate::model::{dominates_slice, Solution, SolutionSet};
use crate::par;

/// Normalizers at or below this are treated as zero.
pub const DEGENERATE_NORMALIZER: f64 = 1e-12;

/// The per-party concession normalizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub value: f64,
    /// Every other party's Pareto set lies inside this party's; rates then
    /// fall back to the raw deviation.
    pub degenerate: bool,
}

/// How membership in the acceptable region is judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MembershipMode {
    /// `x` must also be jointly non-dominated by the sampled `P*`.
    #[default]
    Strict,
    /// Concession rates alone.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub per_party: Vec<bool>,
    pub joint: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcessionEntry {
    pub deviation: f64,
    pub normalizer: f64,
    pub rate: f64,
    pub violation: f64,
}

/// Concession data for every solution (outer) and party (inner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcessionProfile {
    pub entries: Vec<Vec<ConcessionEntry>>,
}

#[derive(Debug, Clone)]
struct PartyModel {
    f_min: Vec<f64>,
    range: Vec<f64>,
    /// Front samples mapped to `(f - f_min) / range`.
    front: Vec<Vec<f64>>,
    normalizer: Normalizer,
}

impl PartyModel {
    fn new(reference: &ReferenceSet, m: usize) -> Result<Self> {
        let p = reference.party(m);
        let range: Vec<f64> = p.f_max.iter().zip(&p.f_min).map(|(hi, lo)| hi - lo).collect();
        if range.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::config(format!("party {} has degenerate objective bounds", p.party)));
        }
        let front = p
            .pf_samples
            .iter()
            .map(|f| f.iter().zip(&p.f_min).zip(&range).map(|((v, lo), r)| (v - lo) / r).collect())
            .collect();
        Ok(Self { f_min: p.f_min.clone(), range, front, normalizer: Normalizer { value: 0.0, degenerate: true } })
    }

    fn deviation(&self, values: &[f64]) -> f64 {
        let x: Vec<f64> = values.iter().zip(&self.f_min).zip(&self.range).map(|((v, lo), r)| (v - lo) / r).collect();
        let d = self
            .front
            .iter()
            .map(|y| x.iter().zip(y).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::INFINITY, f64::min);
        d.max(0.0)
    }

    fn rate(&self, deviation: f64) -> f64 {
        if self.normalizer.degenerate {
            deviation
        } else {
            deviation / self.normalizer.value
        }
    }
}

/// Party-wise deviation of `x` from the sampled Pareto set of party `m`,
/// clamped at zero.
pub fn deviation(x: &Solution, reference: &ReferenceSet, m: usize) -> Result<f64> {
    let model = PartyModel::new(reference, m)?;
    let block = x
        .objectives
        .get(m)
        .ok_or_else(|| Error::contract(format!("solution has no block for party position {}", m)))?;
    if block.values.len() != model.range.len() {
        return Err(Error::contract("objective block length differs from the reference"));
    }
    Ok(model.deviation(&block.values))
}

/// Largest deviation against party `m` over every other party's sampled
/// Pareto set.
pub fn normalizer(problem: &ProblemInstance, reference: &ReferenceSet, m: usize) -> Result<Normalizer> {
    let model = PartyModel::new(reference, m)?;
    normalizer_for(&model, problem, reference, m)
}

fn normalizer_for(
    model: &PartyModel,
    problem: &ProblemInstance,
    reference: &ReferenceSet,
    m: usize,
) -> Result<Normalizer> {
    if reference.num_parties() < 2 {
        return Err(Error::contract("the concession normalizer needs at least two parties"));
    }
    let others: Vec<Vec<f64>> = reference
        .parties
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != m)
        .flat_map(|(_, p)| p.ps_samples.iter().cloned())
        .collect();
    let devs = par::map(&others, |q| problem.evaluate(q).map(|s| model.deviation(s.block(m))));
    let mut value: f64 = 0.0;
    for d in devs {
        value = value.max(d?);
    }
    Ok(Normalizer { value, degenerate: value <= DEGENERATE_NORMALIZER })
}

/// Precomputed concession machinery for one problem and reference set.
#[derive(Debug, Clone)]
pub struct ConcessionModel {
    parties: Vec<PartyModel>,
    /// Joint objective vectors of the sampled `P*`.
    joint_front: Vec<Vec<f64>>,
}

impl ConcessionModel {
    pub fn new(problem: &ProblemInstance, reference: &ReferenceSet) -> Result<Self> {
        reference.validate(problem.dimension(), &problem.parties)?;
        let mut parties = Vec::with_capacity(reference.num_parties());
        for m in 0..reference.num_parties() {
            let mut model = PartyModel::new(reference, m)?;
            model.normalizer = normalizer_for(&model, problem, reference, m)?;
            parties.push(model);
        }
        let joint_front = reference.joint_samples(problem)?.iter().map(Solution::joint).collect();
        Ok(Self { parties, joint_front })
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn normalizer(&self, m: usize) -> Normalizer {
        self.parties[m].normalizer
    }

    pub fn normalizers(&self) -> Vec<Normalizer> {
        self.parties.iter().map(|p| p.normalizer).collect()
    }

    fn check(&self, x: &Solution) -> Result<()> {
        if x.objectives.len() != self.parties.len() {
            return Err(Error::contract(format!(
                "solution carries {} parties, model has {}",
                x.objectives.len(),
                self.parties.len()
            )));
        }
        for (b, p) in x.objectives.iter().zip(&self.parties) {
            if b.values.len() != p.range.len() {
                return Err(Error::contract(format!("party {} block has the wrong length", b.party)));
            }
        }
        Ok(())
    }

    pub fn deviation(&self, x: &Solution, m: usize) -> Result<f64> {
        self.check(x)?;
        Ok(self.parties[m].deviation(x.block(m)))
    }

    /// `D_m(x) / Δ_m`; not capped at 1, since points off the joint
    /// non-dominated set can exceed the normalizer.
    pub fn concession_rate(&self, x: &Solution, m: usize) -> Result<f64> {
        self.check(x)?;
        let p = &self.parties[m];
        Ok(p.rate(p.deviation(x.block(m))))
    }

    /// Concession rates of `x` for every party.
    pub fn rates(&self, x: &Solution) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(self.parties.iter().enumerate().map(|(m, p)| p.rate(p.deviation(x.block(m)))).collect())
    }

    /// Concession rates for every member of `pop`, computed in parallel.
    pub fn rates_many(&self, pop: &SolutionSet) -> Result<Vec<Vec<f64>>> {
        par::map(&pop.solutions, |x| self.rates(x)).into_iter().collect()
    }

    /// Whether no sampled `P*` member jointly dominates `x`.
    pub fn in_joint_front(&self, x: &Solution) -> bool {
        let joint = x.joint();
        !self.joint_front.iter().any(|q| dominates_slice(q, &joint, 0.0))
    }

    pub fn membership(&self, x: &Solution, config: &ConcessionConfig, mode: MembershipMode) -> Result<Membership> {
        let config = config.resolve(self.parties.len())?;
        let rates = self.rates(x)?;
        let efficient = match mode {
            MembershipMode::Strict => self.in_joint_front(x),
            MembershipMode::Relaxed => true,
        };
        let per_party: Vec<bool> = rates.iter().zip(&config.gamma_hat).map(|(g, t)| efficient && g <= t).collect();
        let joint = per_party.iter().all(|b| *b);
        Ok(Membership { per_party, joint })
    }

    pub fn profile(&self, pop: &SolutionSet, config: &ConcessionConfig) -> Result<ConcessionProfile> {
        let config = config.resolve(self.parties.len())?;
        let entries = par::map(&pop.solutions, |x| -> Result<Vec<ConcessionEntry>> {
            self.check(x)?;
            Ok(self
                .parties
                .iter()
                .enumerate()
                .map(|(m, p)| {
                    let deviation = p.deviation(x.block(m));
                    let rate = p.rate(deviation);
                    ConcessionEntry {
                        deviation,
                        normalizer: p.normalizer.value,
                        rate,
                        violation: violation(rate, config.gamma_hat[m]),
                    }
                })
                .collect())
        })
        .into_iter()
        .collect::<Result<_>>()?;
        Ok(ConcessionProfile { entries })
    }

    /// Per-party total violation `sum over x of max(0, γ_m(x) - γ̂_m)`.
    pub fn penalty(&self, pop: &SolutionSet, config: &ConcessionConfig) -> Result<Vec<f64>> {
        let config = config.resolve(self.parties.len())?;
        let rates = self.rates_many(pop)?;
        Ok(penalty_from_rates(&rates, &config.gamma_hat))
    }
}

pub fn violation(rate: f64, threshold: f64) -> f64 {
    (rate - threshold).max(0.0)
}

/// Sums violations per party from precomputed rates.
pub fn penalty_from_rates(rates: &[Vec<f64>], gamma_hat: &[f64]) -> Vec<f64> {
    let mut total = vec![0.0; gamma_hat.len()];
    for row in rates {
        for (m, (g, t)) in row.iter().zip(gamma_hat).enumerate() {
            total[m] += violation(*g, *t);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::MpdmpSpec;

    fn setup(spec: &MpdmpSpec, density: usize) -> (ProblemInstance, ReferenceSet, ConcessionModel) {
        let problem = spec.to_problem().unwrap();
        let reference = spec.sample_reference(density).unwrap();
        let model = ConcessionModel::new(&problem, &reference).unwrap();
        (problem, reference, model)
    }

    #[test]
    fn own_pareto_samples_have_zero_deviation() {
        let (problem, reference, model) = setup(&MpdmpSpec::case1(), 101);
        for m in 0..2 {
            for x in reference.party(m).ps_samples.iter().step_by(10) {
                let s = problem.evaluate(x).unwrap();
                assert_eq!(model.deviation(&s, m).unwrap(), 0.0);
                assert_eq!(model.concession_rate(&s, m).unwrap(), 0.0);
                assert_eq!(deviation(&s, &reference, m).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn other_party_midpoint_has_positive_deviation() {
        let (problem, _, model) = setup(&MpdmpSpec::case1(), 101);
        let s = problem.evaluate(&[4.0, 2.0]).unwrap();
        assert!(model.deviation(&s, 0).unwrap() > 0.0);
        assert!(model.normalizer(0).value > 0.0);
        assert!(!model.normalizer(0).degenerate);
    }

    #[test]
    fn single_sample_reference_reduces_to_max_excess() {
        let spec = MpdmpSpec::case1();
        let mut reference = spec.sample_reference(10).unwrap();
        reference.parties[0].ps_samples.truncate(1);
        reference.parties[0].pf_samples.truncate(1);
        let problem = spec.to_problem().unwrap();
        let x = problem.evaluate(&[4.0, 2.5]).unwrap();
        let y = &reference.parties[0].pf_samples[0];
        let p = &reference.parties[0];
        let expected = (0..2)
            .map(|k| (x.block(0)[k] - y[k]) / (p.f_max[k] - p.f_min[k]))
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0);
        assert_eq!(deviation(&x, &reference, 0).unwrap(), expected);
    }

    #[test]
    fn identical_parties_are_degenerate() {
        let spec = MpdmpSpec::new("twins", vec![vec![[1.0, 1.0], [3.0, 3.0]], vec![[1.0, 1.0], [3.0, 3.0]]]);
        let (problem, _, model) = setup(&spec, 21);
        assert!(model.normalizer(0).degenerate);
        let on_set = problem.evaluate(&[2.0, 2.0]).unwrap();
        assert_eq!(model.concession_rate(&on_set, 1).unwrap(), 0.0);
    }

    #[test]
    fn normalizer_over_union_is_max_of_pairwise() {
        let spec3 = MpdmpSpec::new(
            "three",
            vec![vec![[1.0, 1.0], [3.0, 3.0]], vec![[3.0, 1.0], [5.0, 3.0]], vec![[1.0, 4.0], [2.0, 6.0]]],
        );
        let problem = spec3.to_problem().unwrap();
        let reference = spec3.sample_reference(41).unwrap();
        let joint = normalizer(&problem, &reference, 0).unwrap().value;

        let pair = |j: usize| {
            let spec = MpdmpSpec::new("pair", vec![spec3.parties[0].targets.clone(), spec3.parties[j].targets.clone()]);
            normalizer(&spec.to_problem().unwrap(), &spec.sample_reference(41).unwrap(), 0).unwrap().value
        };
        assert_eq!(joint, pair(1).max(pair(2)));
    }

    #[test]
    fn argmax_point_has_unit_rate() {
        let (problem, reference, model) = setup(&MpdmpSpec::case1(), 51);
        let (best, _) = reference.party(1).ps_samples.iter().fold((None, f64::NEG_INFINITY), |(bx, bd), x| {
            let d = model.deviation(&problem.evaluate(x).unwrap(), 0).unwrap();
            if d > bd {
                (Some(x.clone()), d)
            } else {
                (bx, bd)
            }
        });
        let s = problem.evaluate(&best.unwrap()).unwrap();
        assert_eq!(model.concession_rate(&s, 0).unwrap(), 1.0);
    }

    #[test]
    fn intersection_has_zero_rates_in_case2() {
        let (problem, _, model) = setup(&MpdmpSpec::case2(), 501);
        let s = problem.evaluate(&[3.0, 2.0]).unwrap();
        let rates = model.rates(&s).unwrap();
        assert!(rates.iter().all(|g| *g < 1e-12), "{:?}", rates);
    }

    #[test]
    fn zero_thresholds_accept_only_common_solutions() {
        let (problem, reference, model) = setup(&MpdmpSpec::case1(), 101);
        let cfg = ConcessionConfig::uniform(2, 0.0);
        let joint = reference.joint_samples(&problem).unwrap();
        assert!(joint.iter().all(|x| !model.membership(x, &cfg, MembershipMode::Strict).unwrap().joint));

        let (problem, reference, model) = setup(&MpdmpSpec::case2(), 501);
        let hit = problem.evaluate(&[3.0, 2.0]).unwrap();
        let m = model.membership(&hit, &cfg, MembershipMode::Strict).unwrap();
        assert!(m.joint, "{:?} {:?}", m, model.rates(&hit));
        let off = problem.evaluate(&reference.party(0).ps_samples[10]).unwrap();
        assert!(!model.membership(&off, &cfg, MembershipMode::Strict).unwrap().joint);
    }

    #[test]
    fn unit_thresholds_accept_every_joint_sample() {
        let (problem, reference, model) = setup(&MpdmpSpec::case1(), 101);
        let cfg = ConcessionConfig::uniform(2, 1.0);
        for x in reference.joint_samples(&problem).unwrap().iter() {
            assert!(model.membership(x, &cfg, MembershipMode::Strict).unwrap().joint);
        }
    }

    #[test]
    fn strict_mode_rejects_dominated_points() {
        let (problem, _, model) = setup(&MpdmpSpec::case2(), 101);
        let far = problem.evaluate(&[9.0, 9.0]).unwrap();
        let cfg = ConcessionConfig::uniform(2, 1.0);
        assert!(!model.membership(&far, &cfg, MembershipMode::Strict).unwrap().joint);
        let relaxed = model.membership(&far, &cfg, MembershipMode::Relaxed).unwrap();
        assert_eq!(relaxed.per_party, model.rates(&far).unwrap().iter().map(|g| *g <= 1.0).collect::<Vec<_>>());
    }

    #[test]
    fn penalty_arithmetic_and_additivity() {
        assert!((violation(0.7, 0.5) - 0.2).abs() < 1e-15);
        assert_eq!(violation(0.3, 0.5), 0.0);

        let (problem, _, model) = setup(&MpdmpSpec::case1(), 101);
        let cfg = ConcessionConfig::uniform(2, 0.2);
        let p1 = problem.evaluate_many(&[vec![2.0, 2.0], vec![4.0, 1.5]]).unwrap();
        let p2 = problem.evaluate_many(&[vec![3.0, 2.0], vec![6.0, 6.0], vec![2.0, 2.0]]).unwrap();
        let both: SolutionSet = p1.iter().chain(p2.iter()).cloned().collect();
        let a = model.penalty(&p1, &cfg).unwrap();
        let b = model.penalty(&p2, &cfg).unwrap();
        let ab = model.penalty(&both, &cfg).unwrap();
        for m in 0..2 {
            assert!((a[m] + b[m] - ab[m]).abs() < 1e-12);
        }
        let inside = problem.evaluate_many(&[vec![2.0, 2.0]]).unwrap();
        let loose = ConcessionConfig::uniform(2, 1.0);
        assert_eq!(model.penalty(&inside, &loose).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn profile_is_consistent_with_rates() {
        let (problem, _, model) = setup(&MpdmpSpec::case2(), 101);
        let pop = problem.evaluate_many(&[vec![1.5, 1.5], vec![3.0, 2.0], vec![7.0, 1.0]]).unwrap();
        let cfg = ConcessionConfig::uniform(2, 0.1);
        let profile = model.profile(&pop, &cfg).unwrap();
        for (row, x) in profile.entries.iter().zip(pop.iter()) {
            let rates = model.rates(x).unwrap();
            for (e, g) in row.iter().zip(rates) {
                assert_eq!(e.rate, g);
                assert!(e.rate >= 0.0 && e.violation >= 0.0);
                assert_eq!(e.violation, violation(g, 0.1));
            }
        }
    }
}
