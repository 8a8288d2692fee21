use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mpfair(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpfair"))
        .args(args)
        .current_dir(dir)
        .env_remove("MPFAIR_OUTPUT_DIR")
        .env_remove("MPFAIR_WORKERS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const PLAN: &str = r#"
problems = ["case2"]
algorithms = ["OptMPNDS", "OptAll"]
repetitions = 2
master_seed = 3
concession_grid = [[0.0, 0.0], [0.5, 0.5]]

[ea]
population_size = 20
generations = 5
"#;

#[test]
fn reference_then_evaluate_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mpfair(&["reference", "--problem", "case2", "--density", "20", "--output", "ref.csv"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(tmp.path().join("ref.csv")).unwrap();
    assert_eq!(text.lines().count(), 41);

    fs::write(tmp.path().join("pop.csv"), "x1,x2\n3,2\n2.5,1.75\n3.5,1.5\n").unwrap();
    let out = mpfair(&["evaluate", "pop.csv", "--problem", "case2", "--density", "50"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["parties"].as_array().unwrap().len(), 2);
    assert!(report["psi_np"].as_f64().unwrap() > 0.0);
}

#[test]
fn run_then_emit_table() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("plan.toml"), PLAN).unwrap();
    let out = mpfair(&["run", "plan.toml", "--output-dir", "out"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["runs.csv", "summary.csv", "summary.json"] {
        assert!(tmp.path().join("out").join(f).exists(), "missing {}", f);
    }
    let out = mpfair(&["emit", "out/summary.json", "--format", "csv"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = stdout(&out);
    assert!(table.starts_with("problem,gamma_hat,algorithm,metric,statistic,value"));
    assert!(table.lines().any(|l| l.starts_with("case2,0.5;0.5,OptAll,psi_np,mean,")));
}

#[test]
fn sweep_then_emit_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let plan = r#"
problem = "case2"
density = 60
population_size = 20
gamma_axis = { start = 0.1, stop = 1.0, steps = 4 }
gamma_hat_axis = [0.1, 0.5, 1.0]

[pool]
anchors_per_party = 8
steps = 4
"#;
    fs::write(tmp.path().join("sweep.toml"), plan).unwrap();
    let out = mpfair(&["sweep", "sweep.toml", "--output-dir", "s"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = mpfair(&["emit", "s/sweep.json"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let emitted = stdout(&out);
    assert_eq!(emitted.lines().count(), 1 + 4 * 3);
    assert_eq!(emitted, fs::read_to_string(tmp.path().join("s/sweep.csv")).unwrap());
}

#[test]
fn axioms_report_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mpfair(&["axioms", "--trials", "50", "--seed", "9"], tmp.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 4);

    let out = mpfair(&["axioms", "--trials", "50", "--lambda", "0"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));

    let out = mpfair(&["evaluate", "missing.csv", "--problem", "case2"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    let out = mpfair(&["reference", "--problem", "nope"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("plan.toml"), PLAN).unwrap();
    for (dir, workers) in [("a", "1"), ("b", "2")] {
        let out = mpfair(&["--workers", workers, "run", "plan.toml", "--output-dir", dir], tmp.path());
        assert!(out.status.success());
    }
    for f in ["runs.csv", "summary.csv"] {
        assert_eq!(fs::read(tmp.path().join("a").join(f)).unwrap(), fs::read(tmp.path().join("b").join(f)).unwrap());
    }
}
