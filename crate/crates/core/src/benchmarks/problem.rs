use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fmt_f64, nondominated_indices, validate_parties, ObjectiveBlock, PartySpec, Solution, SolutionSet};
use crate::par;

/// Maps a decision vector to one objective block per party.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, x: &[f64]) -> Result<Vec<ObjectiveBlock>>;
}

impl<F> Evaluator for F
where
    F: Fn(&[f64]) -> Result<Vec<ObjectiveBlock>> + Send + Sync,
{
    fn evaluate(&self, x: &[f64]) -> Result<Vec<ObjectiveBlock>> {
        self(x)
    }
}

/// A box-constrained multi-party problem.
#[derive(Clone)]
pub struct ProblemInstance {
    pub name: String,
    pub bounds: Vec<(f64, f64)>,
    pub parties: Vec<PartySpec>,
    evaluator: Arc<dyn Evaluator>,
}

impl fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("bounds", &self.bounds)
            .field("parties", &self.parties)
            .finish_non_exhaustive()
    }
}

impl ProblemInstance {
    pub fn new(
        name: impl Into<String>,
        bounds: Vec<(f64, f64)>,
        parties: Vec<PartySpec>,
        evaluator: Arc<dyn Evaluator>,
    ) -> Result<Self> {
        validate_parties(&parties)?;
        if bounds.is_empty() {
            return Err(Error::config("problem needs at least one decision variable"));
        }
        if let Some((i, _)) =
            bounds.iter().enumerate().find(|(_, (lo, hi))| !(lo < hi) || !lo.is_finite() || !hi.is_finite())
        {
            return Err(Error::config(format!("invalid bounds for variable {}", i + 1)));
        }
        Ok(Self { name: name.into(), bounds, parties, evaluator })
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.bounds.len() && x.iter().zip(&self.bounds).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    /// Evaluates `x` and checks the returned blocks against the declared layout.
    pub fn evaluate(&self, x: &[f64]) -> Result<Solution> {
        if x.len() != self.dimension() {
            return Err(Error::Domain(format!(
                "decision has length {}, problem {} has dimension {}",
                x.len(),
                self.name,
                self.dimension()
            )));
        }
        if !self.contains(x) {
            return Err(Error::Domain(format!("{:?} lies outside the bounds of {}", x, self.name)));
        }
        let blocks = self.evaluator.evaluate(x)?;
        let sol = Solution::new(x.to_vec(), blocks);
        sol.validate(self.dimension(), &self.parties)?;
        Ok(sol)
    }

    /// Evaluates a batch of points in parallel, preserving order.
    pub fn evaluate_many(&self, xs: &[Vec<f64>]) -> Result<SolutionSet> {
        par::map(xs, |x| self.evaluate(x)).into_iter().collect()
    }

    /// Latin-hypercube sample of `count` points in the bounds.
    pub fn latin_hypercube(&self, count: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
        let n = self.dimension();
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
        for &(lo, hi) in &self.bounds {
            let mut strata: Vec<usize> = (0..count).collect();
            strata.shuffle(rng);
            columns.push(
                strata
                    .into_iter()
                    .map(|s| {
                        let u = (s as f64 + rng.random::<f64>()) / count as f64;
                        lo + u * (hi - lo)
                    })
                    .collect(),
            );
        }
        (0..count).map(|i| (0..n).map(|d| columns[d][i]).collect()).collect()
    }
}

/// Discretized Pareto set and front of one party plus its objective bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartyReference {
    pub party: usize,
    pub ps_samples: Vec<Vec<f64>>,
    pub pf_samples: Vec<Vec<f64>>,
    pub f_min: Vec<f64>,
    pub f_max: Vec<f64>,
}

/// Per-party reference samples, the basis of every PF-dependent metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSet {
    pub parties: Vec<PartyReference>,
    /// Samples per Pareto-set segment used to build the set.
    pub density: usize,
    /// How the objective bounds were obtained.
    pub bounds_source: String,
}

impl ReferenceSet {
    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn party(&self, m: usize) -> &PartyReference {
        &self.parties[m]
    }

    /// Structural checks: non-empty samples, matching lengths, `f_min < f_max`,
    /// and party-wise non-dominance of the front samples.
    pub fn validate(&self, dimension: usize, parties: &[PartySpec]) -> Result<()> {
        if self.parties.len() != parties.len() {
            return Err(Error::config(format!(
                "reference set has {} parties, problem has {}",
                self.parties.len(),
                parties.len()
            )));
        }
        for (r, spec) in self.parties.iter().zip(parties) {
            let k = spec.num_objectives;
            if r.party != spec.party_id {
                return Err(Error::config(format!("reference party {} is out of order", r.party)));
            }
            if r.ps_samples.is_empty() || r.ps_samples.len() != r.pf_samples.len() {
                return Err(Error::config(format!(
                    "party {} needs equally many (non-zero) PS and PF samples",
                    r.party
                )));
            }
            if r.ps_samples.iter().any(|x| x.len() != dimension) {
                return Err(Error::config(format!("party {} PS samples have the wrong dimension", r.party)));
            }
            if r.pf_samples.iter().any(|f| f.len() != k) || r.f_min.len() != k || r.f_max.len() != k {
                return Err(Error::config(format!(
                    "party {} reference has objective count different from K = {}",
                    r.party, k
                )));
            }
            if r.f_min.iter().zip(&r.f_max).any(|(lo, hi)| !(lo < hi)) {
                return Err(Error::config(format!("party {} has degenerate objective bounds", r.party)));
            }
        }
        Ok(())
    }

    /// Every party's PS samples, evaluated for all parties and filtered to the
    /// jointly non-dominated subset: the sampled `P*`.
    pub fn joint_samples(&self, problem: &ProblemInstance) -> Result<SolutionSet> {
        let xs: Vec<Vec<f64>> = self.parties.iter().flat_map(|p| p.ps_samples.iter().cloned()).collect();
        let all = problem.evaluate_many(&xs)?;
        let joint: Vec<Vec<f64>> = all.iter().map(Solution::joint).collect();
        let keep = nondominated_indices(&joint, 0.0);
        Ok(keep.into_iter().map(|i| all.solutions[i].clone()).collect())
    }

    /// Writes `party, px, py, f1, f2, ...`; decision columns are `x1..xn`
    /// when the dimension is not 2.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let dim = self.parties.first().and_then(|p| p.ps_samples.first()).map_or(0, Vec::len);
        let k_max = self.parties.iter().map(|p| p.f_min.len()).max().unwrap_or(0);
        let mut header = vec!["party".to_string()];
        if dim == 2 {
            header.extend(["px".to_string(), "py".to_string()]);
        } else {
            header.extend((1..=dim).map(|i| format!("x{}", i)));
        }
        header.extend((1..=k_max).map(|k| format!("f{}", k)));
        out.write_record(&header)?;
        for p in &self.parties {
            for (x, f) in p.ps_samples.iter().zip(&p.pf_samples) {
                let mut row = vec![p.party.to_string()];
                row.extend(x.iter().map(|v| fmt_f64(*v)));
                row.extend(f.iter().map(|v| fmt_f64(*v)));
                row.extend(std::iter::repeat_n(String::new(), k_max - f.len()));
                out.write_record(&row)?;
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Default Latin-hypercube size for estimating objective bounds.
pub const BOUNDS_SAMPLE_SIZE: usize = 100_000;

/// Estimates per-objective `(f_min, f_max)` for each party by Latin-hypercube
/// sampling the feasible box.
pub fn estimate_objective_bounds(
    problem: &ProblemInstance,
    samples: usize,
    seed: u64,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if samples == 0 {
        return Err(Error::config("bounds estimation needs at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = problem.latin_hypercube(samples, &mut rng);
    let evaluated = problem.evaluate_many(&xs)?;
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = problem
        .parties
        .iter()
        .map(|p| (vec![f64::INFINITY; p.num_objectives], vec![f64::NEG_INFINITY; p.num_objectives]))
        .collect();
    for s in &evaluated {
        for (m, (lo, hi)) in out.iter_mut().enumerate() {
            for (k, v) in s.block(m).iter().enumerate() {
                lo[k] = lo[k].min(*v);
                hi[k] = hi[k].max(*v);
            }
        }
    }
    Ok(out)
}
