//! Share of deployed resources landing on fog nodes as alpha moves weight
//! from cost to makespan. Writes `alpha_sweep.csv` to the working directory.
//!
//! cargo run --release --example alpha_sweep

use std::path::Path;

use fogplace::harness::{emit_csv, mean_by, run_experiment, ExperimentConfig, SolverKind};
use fogplace::infra::Preset;

fn main() -> fogplace::error::Result<()> {
    let alphas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let cfg = ExperimentConfig {
        preset: Some(Preset::Topology20),
        alphas: alphas.to_vec(),
        requests: vec![25],
        seeds: (1..=3).collect(),
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?;
    for a in alphas {
        let at = |r: &fogplace::harness::ResultRow| r.alpha == a;
        println!(
            "alpha {a:.2}: fog {:5.1}%  makespan {:.3}  cost {:.1}",
            mean_by(&rows, SolverKind::Tscp, at, |r| r.fog_usage_pct),
            mean_by(&rows, SolverKind::Tscp, at, |r| r.makespan_sum),
            mean_by(&rows, SolverKind::Tscp, at, |r| r.cost_sum + r.deployment_cost),
        );
    }
    emit_csv(&rows, Path::new("alpha_sweep.csv"), true)
}
