//! TSCP against its random-explore variant and greedy first-fit on the
//! 10-node topology.
//!
//! cargo run --release --example tabu_vs_baselines

use fogplace::harness::{mean_by, run_experiment, ExperimentConfig, SolverKind};

fn main() -> fogplace::error::Result<()> {
    let solvers = [SolverKind::Tscp, SolverKind::RandomExplore, SolverKind::Greedy];
    let cfg = ExperimentConfig {
        solvers: solvers.to_vec(),
        seeds: (1..=5).collect(),
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?;
    println!("{:<16}{:>10}{:>12}{:>10}", "solver", "fitness", "makespan", "fog %");
    for s in solvers {
        println!(
            "{:<16}{:>10.4}{:>12.4}{:>10.1}",
            s.name(),
            mean_by(&rows, s, |_| true, |r| r.fitness),
            mean_by(&rows, s, |_| true, |r| r.makespan_sum),
            mean_by(&rows, s, |_| true, |r| r.fog_usage_pct),
        );
    }
    Ok(())
}
