#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mpfair::benchmarks::ProblemRegistry;
use mpfair::fairness::{ConcessionConfig, FairnessEvaluator, LossMetric};
use mpfair::harness::{
    self, emit_plot_data, run_axiom_suite, run_experiment, run_sweep, write_experiment, write_grid_csv, AxiomOptions,
    EmitFormat, ExperimentPlan, PlotSource, SweepPlan,
};
use mpfair::model::{read_solutions_csv, read_solutions_json};
use mpfair::{par, Error, Result};

#[derive(Parser)]
#[command(name = "mpfair", version, about = "Fairness-aware evaluation of multi-party optimizers")]
struct Cli {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = harness::ENV_WORKERS)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Loss {
    Igd,
    Hv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Score a solution set (JSON or CSV) on a registered problem.
    ///
    /// Decision-only inputs are evaluated on the problem first.
    Evaluate {
        population: PathBuf,
        #[arg(long)]
        problem: String,
        /// Concession config (TOML or JSON); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = mpfair::benchmarks::DEFAULT_DENSITY)]
        density: usize,
        #[arg(long, value_enum, default_value = "igd")]
        loss: Loss,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment plan.
    Run {
        plan: PathBuf,
        #[arg(long, env = harness::ENV_OUTPUT_DIR)]
        output_dir: Option<PathBuf>,
    },
    /// Run a concession sweep.
    Sweep {
        plan: PathBuf,
        #[arg(long, env = harness::ENV_OUTPUT_DIR)]
        output_dir: Option<PathBuf>,
    },
    /// Randomized axiom checks.
    Axioms {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use this penalty weight for every party in the swap check.
        #[arg(long)]
        lambda: Option<f64>,
        /// Write the full report (with witnesses) here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Export an experiment summary or sweep grid for plotting.
    Emit {
        /// A `summary.json` or `sweep.json` written by `run` or `sweep`.
        input: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a problem's reference set as CSV.
    Reference {
        #[arg(long)]
        problem: String,
        #[arg(long, default_value_t = mpfair::benchmarks::DEFAULT_DENSITY)]
        density: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_config(path: &Path) -> Result<ConcessionConfig> {
    let text = fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        ConcessionConfig::from_json(&text)
    } else {
        ConcessionConfig::from_toml(&text)
    }
}

fn evaluate(
    population: &Path,
    problem: &str,
    config: Option<&Path>,
    density: usize,
    loss: Loss,
    output: Option<&Path>,
) -> Result<()> {
    let registry = ProblemRegistry::with_builtins(density)?;
    let entry = registry.get(problem)?;
    let mut pop = if population.extension().is_some_and(|e| e == "csv") {
        read_solutions_csv(File::open(population)?)?
    } else {
        read_solutions_json(File::open(population)?)?
    };
    // decision-only inputs are evaluated on the problem
    if pop.iter().all(|s| s.objectives.is_empty()) {
        let xs: Vec<Vec<f64>> = pop.iter().map(|s| s.decision.clone()).collect();
        pop = entry.problem.evaluate_many(&xs)?;
    }
    let config = config.map(read_config).transpose()?.unwrap_or_default();
    let loss = match loss {
        Loss::Igd => LossMetric::Igd,
        Loss::Hv => LossMetric::HvComplement,
    };
    let report = FairnessEvaluator::new(&entry.problem, &entry.reference)?.with_loss(loss).evaluate(&pop, &config)?;
    let mut out = sink(output)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn run(plan_path: &Path, output_dir: Option<PathBuf>, workers: Option<usize>) -> Result<()> {
    let mut plan = ExperimentPlan::from_toml(&fs::read_to_string(plan_path)?)?;
    if let Some(dir) = output_dir {
        plan.output_dir = dir;
    }
    if workers.is_some() {
        plan.workers = workers;
    }
    let result = run_experiment(&plan)?;
    write_experiment(&result, &plan.output_dir)?;
    println!("{:<12} {:<10} {:<10} {:<12} {:>12} {:>12}", "problem", "gamma_hat", "algorithm", "metric", "mean", "std");
    for r in &result.summary {
        let label = r
            .setting
            .map(|s| result.settings[s].gamma_hat.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(";"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<12} {:<10} {:<10} {:<12} {:>12.4e} {:>12.4e}{}",
            r.problem,
            label,
            r.algorithm.to_string(),
            r.metric.to_string(),
            r.mean,
            r.std,
            if r.winner { " *" } else { "" }
        );
    }
    for f in &result.failures {
        eprintln!("failed: {} {:?} run {:?} ({}): {}", f.problem, f.algorithm, f.run, f.stage, f.error);
    }
    println!("results written to {}", plan.output_dir.display());
    Ok(())
}

fn sweep(plan_path: &Path, output_dir: Option<PathBuf>) -> Result<()> {
    let mut plan = SweepPlan::from_toml(&fs::read_to_string(plan_path)?)?;
    if let Some(dir) = output_dir {
        plan.output_dir = dir;
    }
    let grid = run_sweep(&plan)?;
    fs::create_dir_all(&plan.output_dir)?;
    write_grid_csv(&grid, BufWriter::new(File::create(plan.output_dir.join("sweep.csv"))?))?;
    let mut json = BufWriter::new(File::create(plan.output_dir.join("sweep.json"))?);
    serde_json::to_writer_pretty(&mut json, &grid)?;
    json.flush()?;
    let zeros = grid.scores.iter().flatten().filter(|s| **s == 0.0).count();
    println!(
        "{}: {}x{} grid, C = {:.4e}, {} zero cells; written to {}",
        grid.problem,
        grid.gamma_axis.len(),
        grid.gamma_hat_axis.len(),
        grid.c,
        zeros,
        plan.output_dir.display()
    );
    Ok(())
}

fn axioms(trials: usize, seed: u64, lambda: Option<f64>, output: Option<&Path>) -> Result<()> {
    let report = run_axiom_suite(&AxiomOptions { trials, seed, lambda_override: lambda })?;
    for o in &report.outcomes {
        println!(
            "{} {}: {}/{} trials passed",
            if o.passed() { "PASS" } else { "FAIL" },
            o.axiom,
            o.trials - o.failures,
            o.trials
        );
    }
    if output.is_some() || !report.passed() {
        let mut out: Box<dyn Write> = match output {
            Some(p) => sink(Some(p))?,
            None => Box::new(io::stderr().lock()),
        };
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        out.flush()?;
    }
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report.outcomes.iter().filter(|o| !o.passed()).map(|o| o.axiom.as_str()).collect();
        Err(Error::Invariant(format!("axioms with counterexamples: {}", failed.join(", "))))
    }
}

fn emit(input: &Path, format: Format, output: Option<&Path>) -> Result<()> {
    let source: PlotSource = serde_json::from_reader(io::BufReader::new(File::open(input)?))?;
    let format = match format {
        Format::Csv => EmitFormat::Csv,
        Format::Json => EmitFormat::Json,
    };
    emit_plot_data(&source, format, sink(output)?)
}

fn reference(problem: &str, density: usize, output: Option<&Path>) -> Result<()> {
    let registry = ProblemRegistry::with_builtins(density)?;
    registry.get(problem)?.reference.write_csv(sink(output)?)
}

fn dispatch(cli: Cli) -> Result<()> {
    let (env_dir, env_workers) = harness::env_overrides()?;
    let workers = cli.workers.or(env_workers);
    par::with_workers(workers, move || match cli.command {
        Command::Evaluate { population, problem, config, density, loss, output } => {
            evaluate(&population, &problem, config.as_deref(), density, loss, output.as_deref())
        }
        Command::Run { plan, output_dir } => run(&plan, output_dir.or(env_dir), workers),
        Command::Sweep { plan, output_dir } => sweep(&plan, output_dir.or(env_dir)),
        Command::Axioms { trials, seed, lambda, output } => axioms(trials, seed, lambda, output.as_deref()),
        Command::Emit { input, format, output } => emit(&input, format, output.as_deref()),
        Command::Reference { problem, density, output } => reference(&problem, density, output.as_deref()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
