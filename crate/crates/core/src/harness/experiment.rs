use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::plan::{ExperimentPlan, MetricKind};
use super::stats::mean_std;
use crate::algorithms::{Algorithm, EaConfig};
use crate::error::{Error, Result};
use crate::fairness::{comparative_nash, extended_f64, ConcessionConfig, FairnessEvaluator};
use crate::model::{fmt_f64, write_solutions_json, SolutionSet};
use crate::{par, rng};

/// Per-run seed, a pure function of the master seed and the cell identity.
pub fn run_seed(master_seed: u64, problem: &str, algorithm: Algorithm, run: usize) -> u64 {
    rng::stream_id(&[master_seed, rng::label_id(problem), rng::label_id(algorithm.name()), run as u64])
}

/// Hex SHA-256 of the JSON form of `value`.
pub fn config_hash<T: Serialize>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{:02x}", b)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    /// Index into the plan's threshold settings, for threshold-dependent metrics.
    pub setting: Option<usize>,
    pub metric: MetricKind,
    #[serde(with = "extended_f64")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub problem: String,
    pub algorithm: Option<Algorithm>,
    pub run: Option<usize>,
    pub stage: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub problem: String,
    pub setting: Option<usize>,
    pub algorithm: Algorithm,
    pub metric: MetricKind,
    pub n: usize,
    #[serde(with = "extended_f64")]
    pub mean: f64,
    #[serde(with = "extended_f64")]
    pub std: f64,
    pub winner: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationRecord {
    pub problem: String,
    pub algorithm: Algorithm,
    pub run: usize,
    pub seed: u64,
    pub config_hash: String,
    #[serde(skip)]
    pub population: SolutionSet,
}

/// The resolved `C` of one (problem, setting) comparison group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupConstant {
    pub problem: String,
    pub setting: usize,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub plan: ExperimentPlan,
    pub settings: Vec<ConcessionConfig>,
    pub runs: Vec<RunRecord>,
    pub summary: Vec<SummaryRow>,
    pub failures: Vec<CellFailure>,
    pub constants: Vec<GroupConstant>,
    #[serde(skip)]
    pub populations: Vec<PopulationRecord>,
}

impl ExperimentResult {
    pub fn summary_for(
        &self,
        problem: &str,
        setting: Option<usize>,
        algorithm: Algorithm,
        metric: MetricKind,
    ) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.problem == problem && r.setting == setting && r.algorithm == algorithm && r.metric == metric)
    }

    pub fn values(&self, problem: &str, setting: Option<usize>, algorithm: Algorithm, metric: MetricKind) -> Vec<f64> {
        self.runs
            .iter()
            .filter(|r| r.problem == problem && r.setting == setting && r.algorithm == algorithm && r.metric == metric)
            .map(|r| r.value)
            .collect()
    }
}

struct Cell<'a> {
    problem: &'a str,
    algorithm: Algorithm,
    run: usize,
    seed: u64,
}

/// Runs every (problem, algorithm, repetition) cell and scores the results.
///
/// Cells run in parallel; a failing cell is recorded and the rest continue.
/// Threshold-dependent scores share one `C` per (problem, setting) group.
pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    let registry = plan.registry()?;
    plan.validate(&registry)?;
    let settings = plan.settings();

    let mut cells = Vec::new();
    for problem in &plan.problems {
        for &algorithm in &plan.algorithms {
            for run in 0..plan.repetitions {
                let seed = run_seed(plan.master_seed, problem, algorithm, run);
                cells.push(Cell { problem, algorithm, run, seed });
            }
        }
    }

    let outcomes = par::with_workers(plan.workers, || {
        par::map(&cells, |cell| -> Result<PopulationRecord> {
            let entry = registry.get(cell.problem)?;
            let ea = EaConfig { seed: cell.seed, ..plan.ea.clone() };
            let population = cell.algorithm.run(&entry.problem, &ea)?;
            let config_hash = config_hash(&(cell.problem, cell.algorithm, &ea))?;
            Ok(PopulationRecord {
                problem: cell.problem.to_string(),
                algorithm: cell.algorithm,
                run: cell.run,
                seed: cell.seed,
                config_hash,
                population,
            })
        })
    });

    let mut populations = Vec::new();
    let mut failures = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        match outcome {
            Ok(p) => populations.push(p),
            Err(e) => failures.push(CellFailure {
                problem: cell.problem.to_string(),
                algorithm: Some(cell.algorithm),
                run: Some(cell.run),
                stage: "optimize".into(),
                error: e.to_string(),
            }),
        }
    }

    let mut runs = Vec::new();
    let mut constants = Vec::new();
    for problem in &plan.problems {
        let entry = registry.get(problem)?;
        let group: Vec<&PopulationRecord> = populations.iter().filter(|p| &p.problem == problem).collect();
        if group.is_empty() {
            continue;
        }
        let evaluator = FairnessEvaluator::new(&entry.problem, &entry.reference)?;
        let sets: Vec<SolutionSet> = group.iter().map(|p| p.population.clone()).collect();
        let record = |p: &PopulationRecord, setting: Option<usize>, metric: MetricKind, value: f64| RunRecord {
            problem: p.problem.clone(),
            algorithm: p.algorithm,
            run: p.run,
            seed: p.seed,
            setting,
            metric,
            value,
        };

        for (s, setting) in settings.iter().enumerate() {
            let reports = match evaluator.evaluate_group(&sets, setting) {
                Ok(r) => r,
                Err(e) => {
                    failures.push(CellFailure {
                        problem: problem.clone(),
                        algorithm: None,
                        run: None,
                        stage: format!("score setting {}", s),
                        error: e.to_string(),
                    });
                    continue;
                }
            };
            constants.push(GroupConstant { problem: problem.clone(), setting: s, c: reports[0].provenance.c });
            for (p, report) in group.iter().zip(&reports) {
                for metric in &plan.metrics {
                    let value = match metric {
                        MetricKind::PsiNp => report.psi_np,
                        MetricKind::LogPsiNp => report.log_psi_np,
                        MetricKind::MeanIgd if s == 0 => report.mean_igd,
                        MetricKind::MeanHv if s == 0 => report.mean_hv,
                        _ => continue,
                    };
                    let setting = metric.uses_thresholds().then_some(s);
                    runs.push(record(p, setting, *metric, value));
                }
            }
            if s == 0 && plan.metrics.contains(&MetricKind::Comparative) {
                for run in 0..plan.repetitions {
                    let members: Vec<usize> = (0..group.len()).filter(|i| group[*i].run == run).collect();
                    if members.is_empty() {
                        continue;
                    }
                    let gains: Vec<Vec<f64>> =
                        members.iter().map(|i| reports[*i].parties.iter().map(|d| d.hv).collect()).collect();
                    match comparative_nash(&gains) {
                        Ok(scores) => {
                            for (i, score) in members.iter().zip(scores) {
                                runs.push(record(group[*i], None, MetricKind::Comparative, score));
                            }
                        }
                        Err(e) => failures.push(CellFailure {
                            problem: problem.clone(),
                            algorithm: None,
                            run: Some(run),
                            stage: "comparative".into(),
                            error: e.to_string(),
                        }),
                    }
                }
            }
        }
    }
    runs.sort_by(|a, b| {
        let key = |r: &RunRecord| {
            (
                plan.problems.iter().position(|p| *p == r.problem),
                r.setting,
                plan.metrics.iter().position(|m| *m == r.metric),
                plan.algorithms.iter().position(|a| *a == r.algorithm),
                r.run,
            )
        };
        key(a).cmp(&key(b))
    });

    let summary = summarize(plan, &settings, &runs);
    Ok(ExperimentResult { plan: plan.clone(), settings, runs, summary, failures, constants, populations })
}

fn summarize(plan: &ExperimentPlan, settings: &[ConcessionConfig], runs: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for problem in &plan.problems {
        for metric in &plan.metrics {
            let setting_ids: Vec<Option<usize>> =
                if metric.uses_thresholds() { (0..settings.len()).map(Some).collect() } else { vec![None] };
            for setting in setting_ids {
                let start = rows.len();
                for &algorithm in &plan.algorithms {
                    let values: Vec<f64> = runs
                        .iter()
                        .filter(|r| {
                            &r.problem == problem
                                && r.setting == setting
                                && r.metric == *metric
                                && r.algorithm == algorithm
                        })
                        .map(|r| r.value)
                        .collect();
                    if values.is_empty() {
                        continue;
                    }
                    let (mean, std) = mean_std(&values);
                    rows.push(SummaryRow {
                        problem: problem.clone(),
                        setting,
                        algorithm,
                        metric: *metric,
                        n: values.len(),
                        mean,
                        std,
                        winner: false,
                    });
                }
                let group = &mut rows[start..];
                let best = group
                    .iter()
                    .map(|r| if metric.higher_is_better() { r.mean } else { -r.mean })
                    .fold(f64::NEG_INFINITY, f64::max);
                for r in group.iter_mut() {
                    let score = if metric.higher_is_better() { r.mean } else { -r.mean };
                    r.winner = score == best;
                }
            }
        }
    }
    rows
}

fn setting_label(settings: &[ConcessionConfig], setting: Option<usize>) -> String {
    setting
        .map_or_else(String::new, |s| settings[s].gamma_hat.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(";"))
}

pub const RUNS_HEADER: [&str; 7] = ["problem", "algorithm", "run", "seed", "gamma_hat", "metric", "value"];
pub const SUMMARY_HEADER: [&str; 8] = ["problem", "gamma_hat", "algorithm", "metric", "n", "mean", "std", "winner"];

/// Writes `runs.csv`, `summary.csv`, `failures.csv`, `summary.json` and,
/// when the plan asks for it, per-run populations with metadata sidecars.
pub fn write_experiment(result: &ExperimentResult, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let settings = &result.settings;

    let mut runs = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("runs.csv"))?));
    runs.write_record(RUNS_HEADER)?;
    for r in &result.runs {
        runs.write_record([
            r.problem.clone(),
            r.algorithm.to_string(),
            r.run.to_string(),
            r.seed.to_string(),
            setting_label(settings, r.setting),
            r.metric.to_string(),
            fmt_f64(r.value),
        ])?;
    }
    runs.flush()?;

    let mut summary = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("summary.csv"))?));
    summary.write_record(SUMMARY_HEADER)?;
    for r in &result.summary {
        summary.write_record([
            r.problem.clone(),
            setting_label(settings, r.setting),
            r.algorithm.to_string(),
            r.metric.to_string(),
            r.n.to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.std),
            r.winner.to_string(),
        ])?;
    }
    summary.flush()?;

    let mut failures = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("failures.csv"))?));
    failures.write_record(["problem", "algorithm", "run", "stage", "error"])?;
    for f in &result.failures {
        failures.write_record([
            f.problem.clone(),
            f.algorithm.map(|a| a.to_string()).unwrap_or_default(),
            f.run.map(|r| r.to_string()).unwrap_or_default(),
            f.stage.clone(),
            f.error.clone(),
        ])?;
    }
    failures.flush()?;

    let mut json = BufWriter::new(File::create(dir.join("summary.json"))?);
    serde_json::to_writer_pretty(&mut json, result)?;
    json.flush()?;

    if result.plan.save_populations {
        let pop_dir = dir.join("populations");
        fs::create_dir_all(&pop_dir)?;
        for p in &result.populations {
            let stem = format!("{}__{}__{:03}", p.problem, p.algorithm, p.run);
            write_solutions_json(&p.population, BufWriter::new(File::create(pop_dir.join(format!("{}.json", stem)))?))?;
            let mut meta = BufWriter::new(File::create(pop_dir.join(format!("{}.meta.json", stem)))?);
            serde_json::to_writer_pretty(&mut meta, p)?;
            meta.flush()?;
        }
    }
    Ok(())
}

/// Checks an experiment's recorded summary against its per-run rows.
pub fn verify_summary(result: &ExperimentResult) -> Result<()> {
    let recomputed = summarize(&result.plan, &result.settings, &result.runs);
    if recomputed != result.summary {
        return Err(Error::Invariant("summary rows disagree with per-run records".into()));
    }
    Ok(())
}
