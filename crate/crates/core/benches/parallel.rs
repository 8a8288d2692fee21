use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use mpfair::algorithms::{Algorithm, EaConfig};
use mpfair::benchmarks::MpdmpSpec;
use mpfair::fairness::{ConcessionConfig, FairnessEvaluator};
use mpfair::harness::{run_experiment, ExperimentPlan};
use mpfair::par;

fn pools() -> [(&'static str, Option<usize>); 2] {
    [("sequential", Some(1)), ("pool", None)]
}

fn evaluation(c: &mut Criterion) {
    let spec = MpdmpSpec::case2();
    let problem = spec.to_problem().unwrap();
    let reference = spec.sample_reference(500).unwrap();
    let evaluator = FairnessEvaluator::new(&problem, &reference).unwrap();
    let xs: Vec<Vec<f64>> = (0..400).map(|i| vec![1.0 + (i % 20) as f64 * 0.2, 1.0 + (i / 20) as f64 * 0.1]).collect();
    let pop = problem.evaluate_many(&xs).unwrap();
    let config = ConcessionConfig::default();

    let mut group = c.benchmark_group("evaluate");
    for (name, workers) in pools() {
        group.bench_function(BenchmarkId::new("evaluate_many", name), |b| {
            b.iter(|| par::with_workers(workers, || problem.evaluate_many(&xs).unwrap()))
        });
        group.bench_function(BenchmarkId::new("rates_many", name), |b| {
            b.iter(|| par::with_workers(workers, || evaluator.model().rates_many(&pop).unwrap()))
        });
        group.bench_function(BenchmarkId::new("score", name), |b| {
            b.iter(|| par::with_workers(workers, || evaluator.evaluate(&pop, &config).unwrap()))
        });
    }
    group.finish();
}

fn experiment(c: &mut Criterion) {
    let mut plan = ExperimentPlan::new(vec!["case2".into()], vec![Algorithm::OptMpnds, Algorithm::OptAll]);
    plan.repetitions = 4;
    plan.ea = EaConfig { population_size: 40, generations: 20, ..EaConfig::default() };

    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    for (name, workers) in pools() {
        let run = ExperimentPlan { workers, ..plan.clone() };
        group.bench_function(BenchmarkId::new("run_experiment", name), |b| b.iter(|| run_experiment(&run).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, evaluation, experiment);
criterion_main!(benches);
