//! Baseline multi-party optimizers built on NSGA-II.
//!
//! [`Algorithm::OptAll`] treats the concatenated objectives of all parties as
//! one many-objective problem. [`Algorithm::OptMpnds`] replaces Pareto ranking
//! with multi-party layers: each party sorts on its own objectives and the
//! layer key is the sum of the party front indices. Both use binary
//! tournaments, simulated binary crossover and polynomial mutation, and
//! crowding distance in the concatenated objective space.

mod operators;
mod sorting;

pub use operators::{polynomial_mutation, sbx};
pub use sorting::{crowding_distance, fast_nondominated_sort, multiparty_ranks};

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::ProblemInstance;
use crate::error::{Error, Result};
use crate::model::{Solution, SolutionSet};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_eta: f64,
    pub crossover_prob: f64,
    pub mutation_eta: f64,
    /// Per-variable mutation probability; `None` means `1 / n`.
    pub mutation_prob: Option<f64>,
    pub seed: u64,
}

impl Default for EaConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 250,
            crossover_eta: 20.0,
            crossover_prob: 0.9,
            mutation_eta: 20.0,
            mutation_prob: None,
            seed: 0,
        }
    }
}

impl EaConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 4 || !self.population_size.is_multiple_of(2) {
            return Err(Error::config(format!(
                "population size must be even and at least 4, got {}",
                self.population_size
            )));
        }
        let probs = [Some(self.crossover_prob), self.mutation_prob];
        if let Some(p) = probs.iter().flatten().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::config(format!("probability {} is outside [0, 1]", p)));
        }
        if !(self.crossover_eta >= 0.0 && self.mutation_eta >= 0.0) {
            return Err(Error::config("distribution indices must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "OptAll")]
    OptAll,
    #[serde(rename = "OptMPNDS")]
    OptMpnds,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::OptAll, Algorithm::OptMpnds];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::OptAll => "OptAll",
            Algorithm::OptMpnds => "OptMPNDS",
        }
    }

    pub fn run(&self, problem: &ProblemInstance, config: &EaConfig) -> Result<SolutionSet> {
        run_with_observer(*self, problem, config, |_, _| {})
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown algorithm {:?} (expected OptAll or OptMPNDS)", s)))
    }
}

/// A population with its layer index and crowding distance.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedPopulation {
    pub solutions: SolutionSet,
    pub rank: Vec<usize>,
    pub crowding: Vec<f64>,
}

impl RankedPopulation {
    fn new(algorithm: Algorithm, solutions: SolutionSet) -> Self {
        let joint: Vec<Vec<f64>> = solutions.iter().map(Solution::joint).collect();
        let rank = match algorithm {
            Algorithm::OptAll => fast_nondominated_sort(&joint),
            Algorithm::OptMpnds => multiparty_ranks(&solutions.solutions),
        };
        let mut crowding = vec![0.0; rank.len()];
        let layers = rank.iter().copied().max().map_or(0, |r| r + 1);
        for layer in 0..layers {
            let front: Vec<usize> = (0..rank.len()).filter(|i| rank[*i] == layer).collect();
            for (i, d) in front.iter().zip(crowding_distance(&joint, &front)) {
                crowding[*i] = d;
            }
        }
        Self { solutions, rank, crowding }
    }

    /// Members of layer 0.
    pub fn first_layer(&self) -> SolutionSet {
        self.solutions.iter().zip(&self.rank).filter(|(_, r)| **r == 0).map(|(s, _)| s.clone()).collect()
    }

    fn better(&self, a: usize, b: usize) -> bool {
        self.rank[a] < self.rank[b] || (self.rank[a] == self.rank[b] && self.crowding[a] > self.crowding[b])
    }

    /// The best `n` members by layer, then by crowding distance.
    fn truncate(self, algorithm: Algorithm, n: usize) -> Self {
        let mut order: Vec<usize> = (0..self.rank.len()).collect();
        order.sort_by(|a, b| {
            self.rank[*a].cmp(&self.rank[*b]).then(self.crowding[*b].total_cmp(&self.crowding[*a])).then(a.cmp(b))
        });
        order.truncate(n);
        order.sort_unstable();
        let kept: SolutionSet = order.into_iter().map(|i| self.solutions.solutions[i].clone()).collect();
        RankedPopulation::new(algorithm, kept)
    }
}

fn tournament(pop: &RankedPopulation, rng: &mut impl Rng) -> usize {
    let n = pop.rank.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    if pop.better(b, a) {
        b
    } else {
        a
    }
}

/// Runs the optimizer, calling `observer(generation, population)` on the
/// initial population (generation 0) and after every survivor selection.
pub fn run_with_observer<F>(
    algorithm: Algorithm,
    problem: &ProblemInstance,
    config: &EaConfig,
    mut observer: F,
) -> Result<SolutionSet>
where
    F: FnMut(usize, &RankedPopulation),
{
    config.validate()?;
    let mut rng = rng::stream(config.seed, &[rng::label_id(algorithm.name())]);
    let bounds = &problem.bounds;
    let n_pop = config.population_size;
    let p_mut = config.mutation_prob.unwrap_or(1.0 / problem.dimension() as f64);

    let initial: Vec<Vec<f64>> =
        (0..n_pop).map(|_| bounds.iter().map(|(lo, hi)| rng.random_range(*lo..=*hi)).collect()).collect();
    let mut pop = RankedPopulation::new(algorithm, problem.evaluate_many(&initial)?);
    observer(0, &pop);

    for generation in 1..=config.generations {
        let mut children: Vec<Vec<f64>> = Vec::with_capacity(n_pop);
        while children.len() < n_pop {
            let a = tournament(&pop, &mut rng);
            let b = tournament(&pop, &mut rng);
            let (mut c1, mut c2) = sbx(
                &pop.solutions.solutions[a].decision,
                &pop.solutions.solutions[b].decision,
                bounds,
                config.crossover_eta,
                config.crossover_prob,
                &mut rng,
            );
            polynomial_mutation(&mut c1, bounds, config.mutation_eta, p_mut, &mut rng);
            polynomial_mutation(&mut c2, bounds, config.mutation_eta, p_mut, &mut rng);
            children.push(c1);
            children.push(c2);
        }
        let offspring = problem.evaluate_many(&children)?;
        let combined: SolutionSet = pop.solutions.solutions.into_iter().chain(offspring.solutions).collect();
        pop = RankedPopulation::new(algorithm, combined).truncate(algorithm, n_pop);
        observer(generation, &pop);
    }
    Ok(match algorithm {
        Algorithm::OptAll => crate::model::nondominated_filter(&pop.solutions, crate::model::Scope::Joint)?,
        Algorithm::OptMpnds => pop.first_layer(),
    })
}

/// Convenience wrapper for [`Algorithm::OptAll`].
pub fn opt_all(problem: &ProblemInstance, config: &EaConfig) -> Result<SolutionSet> {
    Algorithm::OptAll.run(problem, config)
}

/// Convenience wrapper for [`Algorithm::OptMpnds`].
pub fn opt_mpnds(problem: &ProblemInstance, config: &EaConfig) -> Result<SolutionSet> {
    Algorithm::OptMpnds.run(problem, config)
}
