//! Threshold sweeps over populations with prescribed concession levels.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{MpdmpSpec, ProblemInstance, ProblemRegistry, ReferenceSet, DEFAULT_DENSITY};
use crate::error::{Error, Result};
use crate::fairness::{penalty_from_rates, Assessment, CSetting, ConcessionConfig, FairnessEvaluator};
use crate::metrics::igd_per_party;
use crate::model::{nondominated_indices, Solution, SolutionSet};
use crate::par;

/// An explicit list of values or `steps` evenly spaced values from `start`
/// to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, steps: usize },
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match self {
            Axis::Values(v) => v.clone(),
            Axis::Range { start, stop, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n).map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64).collect(),
            },
        };
        if v.is_empty() {
            return Err(Error::config("sweep axis is empty"));
        }
        if v.iter().any(|g| !(0.0..=1.0).contains(g)) || v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config("sweep axes must be strictly increasing within [0, 1]"));
        }
        Ok(v)
    }
}

fn default_population() -> usize {
    100
}

fn default_per_party() -> usize {
    40
}

fn default_steps() -> usize {
    16
}

fn default_density() -> usize {
    DEFAULT_DENSITY
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// Settings of the synthetic candidate pool the sweep populations are drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolConfig {
    /// Pareto-set samples per party used as interpolation anchors.
    #[serde(default = "default_per_party")]
    pub anchors_per_party: usize,
    /// Interpolation steps between anchors of two parties.
    #[serde(default = "default_steps")]
    pub steps: usize,
}

impl Default for PoolConfig {
    fn default() -> Self {
        Self { anchors_per_party: default_per_party(), steps: default_steps() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPlan {
    pub problem: String,
    /// Optional inline definition; otherwise `problem` names a built-in.
    #[serde(default)]
    pub spec: Option<MpdmpSpec>,
    #[serde(default = "default_density")]
    pub density: usize,
    pub gamma_axis: Axis,
    pub gamma_hat_axis: Axis,
    /// Vary only this party's threshold (1-based); the others stay at
    /// `fixed_gamma_hat`.
    #[serde(default)]
    pub asymmetric_party: Option<usize>,
    #[serde(default)]
    pub fixed_gamma_hat: f64,
    #[serde(default = "default_population")]
    pub population_size: usize,
    #[serde(default)]
    pub lambda: Vec<f64>,
    #[serde(rename = "C", default)]
    pub c: CSetting,
    #[serde(default)]
    pub pool: PoolConfig,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl SweepPlan {
    pub fn new(problem: impl Into<String>, gamma_axis: Axis, gamma_hat_axis: Axis) -> Self {
        Self {
            problem: problem.into(),
            spec: None,
            density: default_density(),
            gamma_axis,
            gamma_hat_axis,
            asymmetric_party: None,
            fixed_gamma_hat: 0.0,
            population_size: default_population(),
            lambda: Vec::new(),
            c: CSetting::Auto,
            pool: PoolConfig::default(),
            output_dir: default_output_dir(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    fn instance(&self) -> Result<(ProblemInstance, ReferenceSet)> {
        let mut registry = ProblemRegistry::with_builtins(self.density)?;
        if let Some(spec) = &self.spec {
            let spec = MpdmpSpec { name: self.problem.clone(), ..spec.clone() };
            registry.register_mpdmp(&spec, self.density)?;
        }
        let entry = registry.get(&self.problem)?;
        Ok((entry.problem.clone(), entry.reference.clone()))
    }
}

/// Sweep scores: `scores[i][j]` is the score of the population at level
/// `gamma_axis[i]` under threshold `gamma_hat_axis[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub problem: String,
    pub gamma_axis: Vec<f64>,
    pub gamma_hat_axis: Vec<f64>,
    /// The party whose threshold varies, when asymmetric.
    pub party: Option<usize>,
    pub c: f64,
    pub population_sizes: Vec<usize>,
    pub scores: Vec<Vec<f64>>,
}

/// Jointly non-dominated candidates and their concession rates.
#[derive(Debug, Clone)]
pub struct CandidatePool {
    pub solutions: SolutionSet,
    pub rates: Vec<Vec<f64>>,
}

fn evenly_spaced<T: Clone>(items: &[T], count: usize) -> Vec<T> {
    if items.len() <= count || count == 0 {
        return items.to_vec();
    }
    if count == 1 {
        return vec![items[0].clone()];
    }
    (0..count).map(|i| items[(i * (items.len() - 1) + (count - 1) / 2) / (count - 1)].clone()).collect()
}

/// Pareto-set samples of every party plus convex interpolations between the
/// anchors of each pair of parties, filtered to the jointly non-dominated
/// subset.
pub fn candidate_pool(
    problem: &ProblemInstance,
    reference: &ReferenceSet,
    evaluator: &FairnessEvaluator,
    pool: &PoolConfig,
) -> Result<CandidatePool> {
    let mut xs: Vec<Vec<f64>> = reference.parties.iter().flat_map(|p| p.ps_samples.iter().cloned()).collect();
    let anchors: Vec<Vec<Vec<f64>>> =
        reference.parties.iter().map(|p| evenly_spaced(&p.ps_samples, pool.anchors_per_party)).collect();
    for i in 0..anchors.len() {
        for j in (i + 1)..anchors.len() {
            for a in &anchors[i] {
                for b in &anchors[j] {
                    for s in 1..pool.steps {
                        let t = s as f64 / pool.steps as f64;
                        let x: Vec<f64> = a.iter().zip(b).map(|(u, v)| u + t * (v - u)).collect();
                        if problem.contains(&x) {
                            xs.push(x);
                        }
                    }
                }
            }
        }
    }
    let all = problem.evaluate_many(&xs)?;
    let joint: Vec<Vec<f64>> = all.iter().map(Solution::joint).collect();
    let solutions: SolutionSet =
        nondominated_indices(&joint, 0.0).into_iter().map(|i| all.solutions[i].clone()).collect();
    let rates = evaluator.model().rates_many(&solutions)?;
    Ok(CandidatePool { solutions, rates })
}

impl CandidatePool {
    /// Up to `size` members whose level is at most `gamma`, evenly spread
    /// over the level-sorted candidates so the largest admissible level is
    /// always included. The level is the largest rate, or `party`'s rate.
    pub fn population_at(&self, gamma: f64, size: usize, party: Option<usize>) -> SolutionSet {
        let level = |i: usize| match party {
            Some(m) => self.rates[i][m],
            None => self.rates[i].iter().copied().fold(0.0, f64::max),
        };
        let mut admissible: Vec<usize> = (0..self.solutions.len()).filter(|i| level(*i) <= gamma).collect();
        admissible.sort_by(|a, b| level(*a).total_cmp(&level(*b)).then(a.cmp(b)));
        let mut picked = evenly_spaced(&admissible, size);
        if let (Some(last), Some(top)) = (picked.last_mut(), admissible.last()) {
            *last = *top;
        }
        picked.sort_unstable();
        picked.into_iter().map(|i| self.solutions.solutions[i].clone()).collect()
    }
}

/// Runs a sweep plan end to end and checks the threshold monotonicity of
/// the resulting grid.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepGrid> {
    let (problem, reference) = plan.instance()?;
    let grid = sweep_problem(&problem, &reference, plan)?;
    check_monotonicity(&grid)?;
    Ok(grid)
}

/// Computes the sweep grid for an explicit problem and reference set.
pub fn sweep_problem(problem: &ProblemInstance, reference: &ReferenceSet, plan: &SweepPlan) -> Result<SweepGrid> {
    let gammas = plan.gamma_axis.values()?;
    let thresholds = plan.gamma_hat_axis.values()?;
    let parties = problem.num_parties();
    if plan.population_size == 0 {
        return Err(Error::config("sweep population size must be positive"));
    }
    let party = match plan.asymmetric_party {
        Some(p) if p == 0 || p > parties => {
            return Err(Error::config(format!("asymmetric party {} does not exist", p)));
        }
        Some(p) => Some(p - 1),
        None => None,
    };
    let threshold_vector = |g: f64| -> Vec<f64> {
        match party {
            Some(p) => (0..parties).map(|m| if m == p { g } else { plan.fixed_gamma_hat }).collect(),
            None => vec![g; parties],
        }
    };
    let base = ConcessionConfig::new(threshold_vector(thresholds[0]), plan.lambda.clone(), plan.c);
    for g in &thresholds {
        ConcessionConfig { gamma_hat: threshold_vector(*g), ..base.clone() }.resolve(parties)?;
    }
    let resolved = base.resolve(parties)?;

    let evaluator = FairnessEvaluator::new(problem, reference)?;
    let pool = candidate_pool(problem, reference, &evaluator, &plan.pool)?;
    let populations: Vec<SolutionSet> =
        gammas.iter().map(|g| pool.population_at(*g, plan.population_size, party)).collect();

    // per-party IGD and per-member rates of each non-empty population
    type Row = Option<(Vec<f64>, Vec<Vec<f64>>)>;
    let rows = par::map(&populations, |pop| -> Result<Row> {
        if pop.is_empty() {
            return Ok(None);
        }
        Ok(Some((igd_per_party(reference, pop)?, evaluator.model().rates_many(pop)?)))
    });
    let mut cells = Vec::new();
    let mut assessments = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        if let Some((igd, rates)) = row? {
            for (j, g) in thresholds.iter().enumerate() {
                cells.push((i, j));
                assessments.push(Assessment {
                    hv: vec![0.0; parties],
                    losses: igd.clone(),
                    igd: igd.clone(),
                    penalties: penalty_from_rates(&rates, &threshold_vector(*g)),
                    population_size: populations[i].len(),
                });
            }
        }
    }
    let mut scores = vec![vec![0.0; thresholds.len()]; gammas.len()];
    let mut c = match plan.c {
        CSetting::Fixed(c) => c,
        CSetting::Auto => 0.0,
    };
    if !assessments.is_empty() {
        let reports = evaluator.score_assessments(&assessments, &resolved)?;
        c = reports[0].provenance.c;
        for ((i, j), report) in cells.into_iter().zip(reports) {
            scores[i][j] = report.psi_np;
        }
    }
    Ok(SweepGrid {
        problem: problem.name.clone(),
        gamma_axis: gammas,
        gamma_hat_axis: thresholds,
        party: party.map(|p| p + 1),
        c,
        population_sizes: populations.iter().map(SolutionSet::len).collect(),
        scores,
    })
}

/// Fails unless every row is non-decreasing in the threshold and constant
/// once the threshold reaches the row's level.
pub fn check_monotonicity(grid: &SweepGrid) -> Result<()> {
    for (i, (gamma, row)) in grid.gamma_axis.iter().zip(&grid.scores).enumerate() {
        for j in 1..row.len() {
            if row[j] < row[j - 1] {
                return Err(Error::Invariant(format!(
                    "score drops from {} to {} as the threshold rises to {} at level {} (row {})",
                    row[j - 1],
                    row[j],
                    grid.gamma_hat_axis[j],
                    gamma,
                    i
                )));
            }
        }
        let saturated: Vec<f64> =
            grid.gamma_hat_axis.iter().zip(row).filter(|(g, _)| *g >= gamma).map(|(_, s)| *s).collect();
        if saturated.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Invariant(format!("row {} is not constant for thresholds at or above {}", i, gamma)));
        }
    }
    Ok(())
}
