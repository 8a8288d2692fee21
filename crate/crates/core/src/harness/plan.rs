use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algorithms::{Algorithm, EaConfig};
use crate::benchmarks::{MpdmpSpec, ProblemRegistry, DEFAULT_DENSITY};
use crate::error::{Error, Result};
use crate::fairness::ConcessionConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "meanIGD")]
    MeanIgd,
    #[serde(rename = "meanHV")]
    MeanHv,
    #[serde(rename = "psi_np")]
    PsiNp,
    #[serde(rename = "log_psi_np")]
    LogPsiNp,
    #[serde(rename = "comparative")]
    Comparative,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] =
        [MetricKind::MeanIgd, MetricKind::MeanHv, MetricKind::PsiNp, MetricKind::LogPsiNp, MetricKind::Comparative];

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::MeanIgd => "meanIGD",
            MetricKind::MeanHv => "meanHV",
            MetricKind::PsiNp => "psi_np",
            MetricKind::LogPsiNp => "log_psi_np",
            MetricKind::Comparative => "comparative",
        }
    }

    pub fn higher_is_better(&self) -> bool {
        !matches!(self, MetricKind::MeanIgd)
    }

    /// Whether the value depends on the concession thresholds.
    pub fn uses_thresholds(&self) -> bool {
        matches!(self, MetricKind::PsiNp | MetricKind::LogPsiNp)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MetricKind::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::config(format!("unknown metric {:?}", s)))
    }
}

fn default_repetitions() -> usize {
    30
}

fn default_metrics() -> Vec<MetricKind> {
    vec![MetricKind::MeanIgd, MetricKind::PsiNp, MetricKind::LogPsiNp]
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

fn default_density() -> usize {
    DEFAULT_DENSITY
}

/// A batch of optimizer runs and the metrics to report on them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub problems: Vec<String>,
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<MetricKind>,
    #[serde(default)]
    pub master_seed: u64,
    /// Base thresholds, penalty weights and `C`.
    #[serde(default)]
    pub concession: ConcessionConfig,
    /// Threshold vectors to evaluate; empty means just `concession.gamma_hat`.
    #[serde(default)]
    pub concession_grid: Vec<Vec<f64>>,
    #[serde(default)]
    pub ea: EaConfig,
    /// Reference density of the built-in problems.
    #[serde(default = "default_density")]
    pub density: usize,
    /// Additional MPDMP instances addressable by name.
    #[serde(default)]
    pub problem_specs: Vec<MpdmpSpec>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub save_populations: bool,
    #[serde(default)]
    pub workers: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(problems: Vec<String>, algorithms: Vec<Algorithm>) -> Self {
        Self {
            problems,
            algorithms,
            repetitions: default_repetitions(),
            metrics: default_metrics(),
            master_seed: 0,
            concession: ConcessionConfig::default(),
            concession_grid: Vec::new(),
            ea: EaConfig::default(),
            density: default_density(),
            problem_specs: Vec::new(),
            output_dir: default_output_dir(),
            save_populations: false,
            workers: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Built-in problems plus the plan's own specs.
    pub fn registry(&self) -> Result<ProblemRegistry> {
        let mut registry = ProblemRegistry::with_builtins(self.density)?;
        for spec in &self.problem_specs {
            registry.register_mpdmp(spec, spec.density)?;
        }
        Ok(registry)
    }

    /// Threshold settings to evaluate, in plan order.
    pub fn settings(&self) -> Vec<ConcessionConfig> {
        if self.concession_grid.is_empty() {
            vec![self.concession.clone()]
        } else {
            self.concession_grid
                .iter()
                .map(|g| ConcessionConfig { gamma_hat: g.clone(), ..self.concession.clone() })
                .collect()
        }
    }

    pub fn validate(&self, registry: &ProblemRegistry) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be at least 1"));
        }
        if self.problems.is_empty() || self.algorithms.is_empty() {
            return Err(Error::config("plan needs at least one problem and one algorithm"));
        }
        if self.metrics.is_empty() {
            return Err(Error::config("plan requests no metrics"));
        }
        self.ea.validate()?;
        for name in &self.problems {
            let entry = registry.get(name)?;
            for setting in self.settings() {
                setting.resolve(entry.problem.num_parties())?;
            }
        }
        Ok(())
    }
}
