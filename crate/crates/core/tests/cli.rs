use std::path::Path;
use std::process::{Command, Output};

fn fogplace(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fogplace"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_writes_result_trace_and_placement() {
    let dir = tempfile::tempdir().unwrap();
    let o = fogplace(
        dir.path(),
        &["solve", "--preset", "topology-10", "--solver", "tscp", "--alpha", "0.5", "--seed", "1", "--requests", "5", "--out", "run"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let run = dir.path().join("run");
    let rows = fogplace::harness::read_results(&run.join("result.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].solver, "tscp");
    assert_eq!(rows[0].requests, 5);
    let trace = std::fs::read_to_string(run.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,fitness,best,move_kind,elapsed_ms\n0,"));
    assert!(run.join("placement.json").exists());

    // Refuses to overwrite, then succeeds with --force.
    let args = ["--out", "run", "solve", "--requests", "5"];
    assert_eq!(code(&fogplace(dir.path(), &args)), 1);
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(code(&fogplace(dir.path(), &forced)), 0);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["solve", "--solver", "annealing"][..],
        &["solve", "--alpha", "1.5"],
        &["solve", "--preset", "topology-30"],
        &["frobnicate"],
        &["validate-mobility", "--samples", "lots"],
        &[],
    ] {
        assert_eq!(code(&fogplace(dir.path(), args)), 2, "{args:?}");
    }
    assert_eq!(code(&fogplace(dir.path(), &["--help"])), 0);
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&fogplace(dir.path(), &["sweep", "--config", "missing.json"])), 1);
    std::fs::write(dir.path().join("bad.json"), r#"{"alphas": [0.5, 3]}"#).unwrap();
    let o = fogplace(dir.path(), &["sweep", "--config", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alphas[1]"));
}

#[test]
fn generate_then_solve_and_evaluate_the_same_workload() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&fogplace(d, &["generate", "--requests", "4", "--seed", "3"])), 0);
    let o = fogplace(d, &["solve", "--workload", "workload.json", "--solver", "greedy", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = fogplace(d, &["evaluate", "--workload", "workload.json", "--placement", "placement.json", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let solved = &fogplace::harness::read_results(&d.join("result.csv")).unwrap()[0];
    let mut r = csv::Reader::from_path(d.join("evaluation.csv")).unwrap();
    let rec: fogplace::evaluator::ReportRecord = r.deserialize().next().unwrap().unwrap();
    assert_eq!(rec.fitness, solved.fitness);
    assert_eq!(rec.makespan_sum, solved.makespan_sum);
}

#[test]
fn sweep_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("cfg.json"),
        r#"{"solvers": ["tscp", "greedy"], "requests": [3], "seeds": [1, 2], "quadrature_grid": 8}"#,
    )
    .unwrap();
    for out in ["a", "b"] {
        assert_eq!(code(&fogplace(d, &["sweep", "--config", "cfg.json", "--out", out])), 0);
    }
    let a = std::fs::read(d.join("a/results.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.join("b/results.csv")).unwrap());
    assert_eq!(fogplace::harness::read_results(&d.join("a/results.csv")).unwrap().len(), 4);
}

#[test]
fn validate_mobility_and_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = fogplace(d, &["validate-mobility", "--samples", "2e4", "--bins", "8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let grid = std::fs::read_to_string(d.join("density.csv")).unwrap();
    assert!(grid.starts_with("row,col,analytic,empirical\n"));
    assert_eq!(grid.lines().count(), 65);

    let o = fogplace(d, &["oracle", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.join("oracle.csv")).unwrap();
    assert!(text.starts_with("seed,solver,fitness,feasible,evaluations\n"));
    assert_eq!(text.lines().count(), 3);
}
