//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits non-zero if any failed.
//!
//! cargo test --release --test acceptance

mod common;

use std::time::Instant;

use fogplace::evaluator::{ObjectiveWeights, Problem};
use fogplace::harness::{
    initial_normalizers, mean_by, run_experiment, validate_mobility, write_results, ExperimentConfig, ResultRow,
    SearchConfig, SolverKind, TierSet,
};
use fogplace::infra::{preset_network, Preset};
use fogplace::mobility::{location_density, InitDist, MobilityProfile};
use fogplace::solvers::{exhaustive_optimal, penalty_scale, tabu_search, tiny_problem, ExhaustiveLimits, TabuParams};
use fogplace::vnffg::{generate_workload, WorkloadParams};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mobility_density() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for p_static in [0.0, 0.5] {
        for pause in [0.0, 1.0] {
            let profile = MobilityProfile::new(p_static, 0.01, pause, InitDist::Uniform).unwrap();
            let g = 400;
            let h = 1.0 / g as f64;
            let mass: f64 = (0..g * g)
                .map(|k| {
                    let (i, j) = (k / g, k % g);
                    location_density(&profile, (j as f64 + 0.5) * h, (i as f64 + 0.5) * h) * h * h
                })
                .sum();
            let check = validate_mobility(&profile, 10_000_000, 32, 11).unwrap();
            let ok = (mass - 1.0).abs() <= 1e-3
                && check.samples >= 1_000_000
                && check.l1_error < 0.02
                && (check.mean_trajectory_length - 0.5214).abs() <= 0.002;
            pass &= ok;
            parts.push(format!(
                "p_static {p_static} pause {pause}: mass {mass:.5} cell error {:.4} E[L] {:.4}",
                check.l1_error, check.mean_trajectory_length
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 120.0;
    outcome(pass, format!("{}; {secs:.1} s", parts.join("; ")))
}

fn evaluator_oracle() -> Outcome {
    let net = preset_network(Preset::Topology10, 5).unwrap();
    let w = generate_workload(100, 5, &WorkloadParams::default()).unwrap();
    let problem = Problem::new(net, w.catalog, w.requests).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let p = common::random_placement(&problem, 1000 + k);
        for r in 0..100 {
            let (proc, comm, cost) = common::naive_request(&problem, &p, r);
            let m = problem.request_metrics(&p, r).unwrap();
            for (a, b) in [(m.makespan(), proc + comm), (m.comm_cost, cost)] {
                worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
            }
        }
    }
    outcome(worst <= 1e-12, format!("1000 tree evaluations, worst relative difference {worst:.2e}"))
}

fn optimality_gap() -> Outcome {
    let start = Instant::now();
    let mut gaps = Vec::new();
    let mut exact_le_tabu = true;
    for seed in 0..20 {
        let problem = tiny_problem(seed).unwrap();
        let (ms, cs) = initial_normalizers(&problem, seed).unwrap();
        let weights = ObjectiveWeights::normalized(0.5, ms, cs).unwrap();
        let scale = penalty_scale(&problem, &weights, seed).unwrap();
        let exact = exhaustive_optimal(&problem, &weights, scale, &ExhaustiveLimits::default()).unwrap();
        let params = TabuParams {
            weights,
            penalty_scale: Some(scale),
            ..TabuParams::new(0.5, seed).unwrap()
        };
        let tabu = tabu_search(&problem, &params).unwrap();
        exact_le_tabu &= exact.fitness <= tabu.fitness + 1e-12;
        gaps.push((tabu.fitness - exact.fitness) / exact.fitness);
    }
    let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        mean <= 0.10 && exact_le_tabu && secs < 300.0,
        format!("mean gap {:.2}%, exhaustive <= tabu on all 20: {exact_le_tabu}; {secs:.1} s", 100.0 * mean),
    )
}

fn fitness_of(rows: &[ResultRow], solver: SolverKind, seed: u64) -> f64 {
    rows.iter()
        .find(|r| r.solver == solver.name() && r.seed == seed)
        .map(|r| r.fitness)
        .unwrap()
}

fn baseline_ordering() -> Outcome {
    let cfg = ExperimentConfig {
        solvers: vec![SolverKind::Tscp, SolverKind::RandomExplore, SolverKind::Greedy],
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    let m = |s| mean_by(&rows, s, |_| true, |r| r.fitness);
    let (t, re, g) = (m(SolverKind::Tscp), m(SolverKind::RandomExplore), m(SolverKind::Greedy));
    let wins = cfg
        .seeds
        .iter()
        .filter(|&&s| fitness_of(&rows, SolverKind::Tscp, s) < fitness_of(&rows, SolverKind::Greedy, s))
        .count();
    outcome(
        t <= re && re <= g && wins * 10 >= cfg.seeds.len() * 9,
        format!("mean fitness tscp {t:.4} <= random_explore {re:.4} <= greedy {g:.4}; tscp beats greedy on {wins}/{}", cfg.seeds.len()),
    )
}

/// Spearman rank correlation with average ranks for ties.
fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = (i + j) as f64 / 2.0;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}

fn mobility_awareness() -> Outcome {
    let p_mobile = [0.0, 0.25, 0.5, 0.75, 1.0];
    let cfg = ExperimentConfig {
        solvers: vec![SolverKind::Tscp, SolverKind::Psf],
        p_static: p_mobile.iter().map(|m| 1.0 - m).collect(),
        requests: vec![1],
        search: SearchConfig {
            tabu_tenure: 60,
            stop_after: 200,
            neighborhood_size: 64,
        },
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    let ratios: Vec<f64> = p_mobile
        .iter()
        .map(|m| {
            let at = |r: &ResultRow| r.p_static == Some(1.0 - m);
            mean_by(&rows, SolverKind::Psf, at, |r| r.fitness) / mean_by(&rows, SolverKind::Tscp, at, |r| r.fitness)
        })
        .collect();
    let rho = spearman(&p_mobile, &ratios);
    let pass = (ratios[0] - 1.0).abs() <= 0.02 && ratios[1..].iter().all(|&r| r > 1.0) && rho > 0.0;
    let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
    outcome(pass, format!("PSF/TSCP over p_mobile 0..1: [{}], Spearman {rho:.2}", shown.join(", ")))
}

fn alpha_sweep() -> Outcome {
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let cfg = ExperimentConfig {
        preset: Some(Preset::Topology20),
        alphas: alphas.to_vec(),
        requests: vec![50],
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    let fog: Vec<f64> = alphas
        .iter()
        .map(|&a| mean_by(&rows, SolverKind::Tscp, |r| r.alpha == a, |r| r.fog_usage_pct))
        .collect();
    let monotone = fog.windows(2).all(|w| w[1] >= w[0]);
    let all_cloud = rows.iter().filter(|r| r.alpha == 0.0).all(|r| r.fog_usage_pct == 0.0);
    let shown: Vec<String> = fog.iter().map(|f| format!("{f:.1}")).collect();
    outcome(
        monotone && all_cloud && fog[4] >= 90.0,
        format!("fog usage % over alpha 0..1: [{}]", shown.join(", ")),
    )
}

fn tier_sets() -> Outcome {
    let sets = [TierSet::CloudOnly, TierSet::FogOnly, TierSet::Hybrid];
    let cfg = ExperimentConfig {
        tier_sets: sets.to_vec(),
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg).unwrap();
    let m = |t: TierSet, f: fn(&ResultRow) -> f64| mean_by(&rows, SolverKind::Tscp, |r| r.tiers == t.name(), f);
    let cost: Vec<f64> = sets.iter().map(|&t| m(t, |r| r.cost_sum + r.deployment_cost)).collect();
    let makespan: Vec<f64> = sets.iter().map(|&t| m(t, |r| r.makespan_sum)).collect();
    let fitness: Vec<f64> = sets.iter().map(|&t| m(t, |r| r.fitness)).collect();
    let argmin = |v: &[f64]| (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    let pass = argmin(&cost) == 0 && argmin(&makespan) == 1 && argmin(&fitness) == 2;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join("/");
    outcome(
        pass,
        format!(
            "cloud/fog/hybrid cost {} makespan {} aggregate {}",
            fmt(&cost),
            fmt(&makespan),
            fmt(&fitness)
        ),
    )
}

fn scale_runtime() -> Outcome {
    let mut means = Vec::new();
    let mut worst: f64 = 0.0;
    for requests in [5, 10, 15, 50] {
        let mut total = 0.0;
        for seed in 1..=5 {
            let net = preset_network(Preset::Topology20, seed).unwrap();
            let w = generate_workload(requests, seed, &WorkloadParams::default()).unwrap();
            let problem = Problem::new(net, w.catalog, w.requests).unwrap();
            let (ms, cs) = initial_normalizers(&problem, seed).unwrap();
            let weights = ObjectiveWeights::normalized(0.5, ms, cs).unwrap();
            let params = TabuParams {
                weights,
                ..TabuParams::new(0.5, seed).unwrap()
            };
            let start = Instant::now();
            tabu_search(&problem, &params).unwrap();
            let secs = start.elapsed().as_secs_f64();
            worst = worst.max(secs);
            total += secs;
        }
        means.push(total / 5.0);
    }
    let monotone = means.windows(2).all(|w| w[1] > w[0]);
    let shown: Vec<String> = means.iter().map(|s| format!("{:.3}", s)).collect();
    outcome(
        monotone && worst < 300.0,
        format!("mean seconds for 5/10/15/50 requests: [{}], slowest run {worst:.2} s", shown.join(", ")),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ExperimentConfig {
        solvers: vec![SolverKind::Tscp, SolverKind::RandomExplore, SolverKind::Greedy, SolverKind::Psf],
        p_static: vec![1.0, 0.0],
        requests: vec![5],
        seeds: vec![1, 2, 3],
        ..ExperimentConfig::default()
    };
    std::fs::write(dir.path().join("sweep.json"), cfg.to_json()).unwrap();
    let run = |out: &str| {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_fogplace"))
            .current_dir(dir.path())
            .args(["sweep", "--config", "sweep.json", "--out", out])
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        std::fs::read(dir.path().join(out).join("results.csv")).unwrap()
    };
    let (a, b) = (run("first"), run("second"));
    let mut direct = Vec::new();
    write_results(&run_experiment(&cfg).unwrap(), &mut direct).unwrap();
    outcome(
        a == b && a == direct,
        format!("two CLI sweeps and one library sweep: {} bytes each, identical: {}", a.len(), a == b && a == direct),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("mobility density", mobility_density),
        ("evaluator oracle", evaluator_oracle),
        ("optimality gap", optimality_gap),
        ("baseline ordering", baseline_ordering),
        ("mobility awareness", mobility_awareness),
        ("alpha sweep", alpha_sweep),
        ("tier sets", tier_sets),
        ("scale and runtime", scale_runtime),
        ("determinism", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        failed += !o.pass as usize;
        println!(
            "criterion {} {:<20} {}  {} ({:.1} s)",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
