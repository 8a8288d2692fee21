//! Randomized checks of the four fairness axioms.
//!
//! * A1: raising one utility raises the Nash product.
//! * A2: relabelling the parties (with their thresholds, weights and
//!   reference sets) leaves the score unchanged.
//! * A3: a Pigou-Dalton transfer between two parties' losses raises the score.
//! * A4: swapping an acceptable solution for an unacceptable one lowers the
//!   score once the violated party's weight exceeds the sufficiency bound.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::benchmarks::{MpdmpSpec, ProblemInstance, ReferenceSet};
use crate::error::{Error, Result};
use crate::fairness::{
    lambda_sufficiency_bound, nash_product, utilities, CSetting, ConcessionConfig, FairnessEvaluator, MembershipMode,
};
use crate::metrics::igd_per_party;
use crate::model::SolutionSet;
use crate::{par, rng};

/// Witnesses kept per axiom.
const MAX_WITNESSES: usize = 5;

/// Floor for the swap check's penalty weight. Bounds that are zero up to
/// rounding would otherwise give a weight whose effect on the score is
/// below double precision.
pub const MIN_SWAP_WEIGHT: f64 = 1e-3;

/// Relative tolerance for the symmetry check.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomOptions {
    pub trials: usize,
    pub seed: u64,
    /// Replaces every penalty weight in A4 (for adversarial runs).
    pub lambda_override: Option<f64>,
}

impl AxiomOptions {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed, lambda_override: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomOutcome {
    pub axiom: String,
    pub trials: usize,
    pub failures: usize,
    pub witnesses: Vec<serde_json::Value>,
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub options: AxiomOptions,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(AxiomOutcome::passed)
    }
}

type Trial = std::result::Result<(), serde_json::Value>;

fn collect(axiom: &str, results: Vec<Result<Trial>>) -> Result<AxiomOutcome> {
    let trials = results.len();
    let mut failures = 0;
    let mut witnesses = Vec::new();
    for r in results {
        if let Err(w) = r? {
            failures += 1;
            if witnesses.len() < MAX_WITNESSES {
                witnesses.push(w);
            }
        }
    }
    Ok(AxiomOutcome { axiom: axiom.to_string(), trials, failures, witnesses })
}

fn trial_rng(seed: u64, axiom: &str, trial: usize) -> rng::Rng {
    rng::stream(seed, &[rng::label_id(axiom), trial as u64])
}

fn pareto_monotonicity(seed: u64, trial: usize) -> Trial {
    let mut r = trial_rng(seed, "A1", trial);
    let m = r.random_range(2..=5);
    let losses: Vec<f64> = (0..m).map(|_| r.random_range(0.0..5.0)).collect();
    let penalties: Vec<f64> = (0..m).map(|_| r.random_range(0.0..0.5)).collect();
    let lambda: Vec<f64> = (0..m).map(|_| r.random_range(0.1..10.0)).collect();
    let worst = (0..m).map(|i| losses[i] + lambda[i] * penalties[i]).fold(0.0, f64::max);
    let c = worst + r.random_range(0.1..5.0);
    let k = r.random_range(0..m);
    let mut improved = losses.clone();
    improved[k] = r.random_range(0.0..losses[k].max(1e-9));
    let before = nash_product(&utilities(&losses, &penalties, &lambda, c).expect("lengths match"));
    let after = nash_product(&utilities(&improved, &penalties, &lambda, c).expect("lengths match"));
    if improved[k] < losses[k] && !(after > before) {
        return Err(json!({"seed": seed, "trial": trial, "losses": losses, "improved": improved,
            "penalties": penalties, "lambda": lambda, "C": c, "before": before, "after": after}));
    }
    Ok(())
}

fn mean_preserving_contraction(seed: u64, trial: usize) -> Trial {
    let mut r = trial_rng(seed, "A3", trial);
    let m = r.random_range(2..=5);
    let c = 20.0;
    let losses: Vec<f64> = (0..m).map(|_| r.random_range(0.0..15.0)).collect();
    let zeros = vec![0.0; m];
    let lambda = vec![1.0; m];
    let mut pair: Vec<usize> = (0..m).collect();
    pair.shuffle(&mut r);
    let (i, j) = (pair[0], pair[1]);
    // party `rich` has the smaller loss and so the larger utility
    let (rich, poor) = if losses[i] < losses[j] { (i, j) } else { (j, i) };
    let gap = losses[poor] - losses[rich];
    if gap < 1e-6 {
        return Ok(());
    }
    let delta = gap * r.random_range(0.05..0.95);
    let mut moved = losses.clone();
    moved[rich] += delta;
    moved[poor] -= delta;
    let before = nash_product(&utilities(&losses, &zeros, &lambda, c).expect("lengths match"));
    let after = nash_product(&utilities(&moved, &zeros, &lambda, c).expect("lengths match"));
    if !(after > before) {
        return Err(json!({"seed": seed, "trial": trial, "losses": losses, "moved": moved,
            "before": before, "after": after}));
    }
    Ok(())
}

fn random_targets(r: &mut rng::Rng) -> Vec<[f64; 2]> {
    loop {
        let a: [f64; 2] = [r.random_range(1.0..9.0), r.random_range(1.0..9.0)];
        let b = [r.random_range(1.0..9.0), r.random_range(1.0..9.0)];
        if (a[0] - b[0]).hypot(a[1] - b[1]) > 0.5 {
            return vec![a, b];
        }
    }
}

fn symmetry(seed: u64, trial: usize) -> Result<Trial> {
    let mut r = trial_rng(seed, "A2", trial);
    let m = r.random_range(2..=3);
    let targets: Vec<Vec<[f64; 2]>> = (0..m).map(|_| random_targets(&mut r)).collect();
    let gamma_hat: Vec<f64> = (0..m).map(|_| r.random_range(0.0..1.0)).collect();
    let lambda: Vec<f64> = (0..m).map(|_| r.random_range(0.5..20.0)).collect();
    let xs: Vec<Vec<f64>> = (0..20).map(|_| vec![r.random_range(0.0..10.0), r.random_range(0.0..10.0)]).collect();
    let mut perm: Vec<usize> = (0..m).collect();
    while perm.iter().enumerate().all(|(i, p)| i == *p) {
        perm.shuffle(&mut r);
    }
    let score = |order: &[usize]| -> Result<f64> {
        let spec = MpdmpSpec::new("sym", order.iter().map(|i| targets[*i].clone()).collect());
        let problem = spec.to_problem()?;
        let reference = spec.sample_reference(50)?;
        let pop = problem.evaluate_many(&xs)?;
        let cfg = ConcessionConfig::new(
            order.iter().map(|i| gamma_hat[*i]).collect(),
            order.iter().map(|i| lambda[*i]).collect(),
            CSetting::Auto,
        );
        Ok(FairnessEvaluator::new(&problem, &reference)?.evaluate(&pop, &cfg)?.psi_np)
    };
    let identity: Vec<usize> = (0..m).collect();
    let (a, b) = (score(&identity)?, score(&perm)?);
    if (a - b).abs() > SYMMETRY_TOLERANCE * a.abs().max(b.abs()) {
        return Ok(Err(json!({"seed": seed, "trial": trial, "targets": targets, "permutation": perm,
            "gamma_hat": gamma_hat, "lambda": lambda, "decisions": xs, "score": a, "permuted_score": b})));
    }
    Ok(Ok(()))
}

/// Shared fixture for the swap checks.
struct SwapFixture {
    problem: ProblemInstance,
    reference: ReferenceSet,
    evaluator: FairnessEvaluator,
    candidates: SolutionSet,
}

impl SwapFixture {
    fn new() -> Result<Self> {
        let spec = MpdmpSpec::case2();
        let problem = spec.to_problem()?;
        let reference = spec.sample_reference(100)?;
        let evaluator = FairnessEvaluator::new(&problem, &reference)?;
        let candidates = reference.joint_samples(&problem)?;
        Ok(Self { problem, reference, evaluator, candidates })
    }
}

fn acceptable_swap(fx: &SwapFixture, opts: &AxiomOptions, trial: usize) -> Result<Trial> {
    let mut r = trial_rng(opts.seed, "A4", trial);
    let parties = fx.problem.num_parties();
    let gamma_hat: Vec<f64> = (0..parties).map(|_| r.random_range(0.05..0.9)).collect();
    let cfg = ConcessionConfig::new(gamma_hat.clone(), Vec::new(), CSetting::Auto);
    let model = fx.evaluator.model();
    let mut acceptable = Vec::new();
    let mut unacceptable = Vec::new();
    for (i, x) in fx.candidates.iter().enumerate() {
        if model.membership(x, &cfg, MembershipMode::Strict)?.joint {
            acceptable.push(i);
        } else {
            unacceptable.push(i);
        }
    }
    if acceptable.is_empty() || unacceptable.is_empty() {
        return Err(Error::Invariant("swap fixture lacks acceptable or unacceptable candidates".into()));
    }
    let size = r.random_range(3..=15).min(acceptable.len());
    let p1_idx: Vec<usize> = acceptable.choose_multiple(&mut r, size).copied().collect();
    let incoming = *unacceptable.choose(&mut r).expect("non-empty");
    let out_pos = r.random_range(0..size);

    let p1: SolutionSet = p1_idx.iter().map(|i| fx.candidates.solutions[*i].clone()).collect();
    let mut p2 = p1.clone();
    p2.solutions[out_pos] = fx.candidates.solutions[incoming].clone();

    let rates_in = model.rates(&fx.candidates.solutions[incoming])?;
    let phi: Vec<f64> = rates_in.iter().zip(&gamma_hat).map(|(g, t)| (g - t).max(0.0)).collect();
    let m0 = (0..parties).max_by(|a, b| phi[*a].total_cmp(&phi[*b])).expect("parties");

    let l1 = igd_per_party(&fx.reference, &p1)?;
    let l2 = igd_per_party(&fx.reference, &p2)?;
    let pen1 = fx.evaluator.model().penalty(&p1, &cfg)?;
    let pen2 = fx.evaluator.model().penalty(&p2, &cfg)?;
    let c = 1.0 + 2.0 * l1.iter().copied().fold(0.0, f64::max);
    let u1 = utilities(&l1, &pen1, &vec![1.0; parties], c)?;
    let mu: Vec<f64> = (0..parties).map(|m| if m == m0 { l2[m] - l1[m] } else { (l1[m] - l2[m]).max(0.0) }).collect();
    let bound = lambda_sufficiency_bound(m0, u1[m0], &mu, phi[m0], &u1)?;

    let mut lambda: Vec<f64> = (0..parties).map(|_| r.random_range(0.1..10.0)).collect();
    lambda[m0] = (bound * 1.01).max(MIN_SWAP_WEIGHT);
    if let Some(l) = opts.lambda_override {
        lambda = vec![l; parties];
    }
    let before = nash_product(&utilities(&l1, &pen1, &lambda, c)?);
    let after = nash_product(&utilities(&l2, &pen2, &lambda, c)?);
    if !(after < before) {
        return Ok(Err(json!({
            "seed": opts.seed, "trial": trial, "gamma_hat": gamma_hat, "m0": m0 + 1,
            "p1": p1.iter().map(|s| s.decision.clone()).collect::<Vec<_>>(),
            "removed": p1.solutions[out_pos].decision, "inserted": fx.candidates.solutions[incoming].decision,
            "lambda": lambda, "bound": bound, "C": c, "before": before, "after": after
        })));
    }
    Ok(Ok(()))
}

/// Runs every axiom check `trials` times. Each trial draws from its own
/// stream, so results do not depend on the worker count.
pub fn run_axiom_suite(opts: &AxiomOptions) -> Result<AxiomReport> {
    if opts.trials == 0 {
        return Err(Error::config("trials must be at least 1"));
    }
    if let Some(l) = opts.lambda_override {
        if !(l >= 0.0) {
            return Err(Error::config("lambda override must be non-negative"));
        }
    }
    let n = opts.trials;
    let seed = opts.seed;
    let fixture = SwapFixture::new()?;
    let outcomes = vec![
        collect("A1 Pareto monotonicity", par::map_range(n, |t| Ok(pareto_monotonicity(seed, t))))?,
        collect("A2 symmetry", par::map_range(n, |t| symmetry(seed, t)))?,
        collect("A3 mean-preserving contraction", par::map_range(n, |t| Ok(mean_preserving_contraction(seed, t))))?,
        collect("A4 acceptable swap", par::map_range(n, |t| acceptable_swap(&fixture, opts, t)))?,
    ];
    Ok(AxiomReport { options: opts.clone(), outcomes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let report = run_axiom_suite(&AxiomOptions::new(200, 7)).unwrap();
        for o in &report.outcomes {
            assert!(o.passed(), "{} failed: {:?}", o.axiom, o.witnesses);
            assert_eq!(o.trials, 200);
        }
    }

    #[test]
    fn zero_weights_break_the_swap_axiom() {
        let opts = AxiomOptions { lambda_override: Some(0.0), ..AxiomOptions::new(300, 1) };
        let report = run_axiom_suite(&opts).unwrap();
        let a4 = &report.outcomes[3];
        assert!(a4.failures > 0);
        assert!(a4.witnesses[0]["inserted"].is_array());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_axiom_suite(&AxiomOptions::new(0, 1)).is_err());
    }
}
