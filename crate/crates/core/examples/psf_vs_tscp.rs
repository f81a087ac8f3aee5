//! How much is lost by planning as if fog nodes never moved. PSF plans on a
//! frozen copy of the network; both plans are scored on the mobile one.
//!
//! cargo run --release --example psf_vs_tscp

use fogplace::harness::{mean_by, run_experiment, ExperimentConfig, SearchConfig, SolverKind};

fn main() -> fogplace::error::Result<()> {
    let p_static = [1.0, 0.75, 0.5, 0.25, 0.0];
    let cfg = ExperimentConfig {
        solvers: vec![SolverKind::Tscp, SolverKind::Psf],
        p_static: p_static.to_vec(),
        requests: vec![1],
        search: SearchConfig {
            tabu_tenure: 60,
            stop_after: 200,
            neighborhood_size: 64,
        },
        ..ExperimentConfig::default()
    };
    let rows = run_experiment(&cfg)?;
    for ps in p_static {
        let at = |r: &fogplace::harness::ResultRow| r.p_static == Some(ps);
        let psf = mean_by(&rows, SolverKind::Psf, at, |r| r.fitness);
        let tscp = mean_by(&rows, SolverKind::Tscp, at, |r| r.fitness);
        println!("p_static {ps:.2}: PSF/TSCP = {:.4}", psf / tscp);
    }
    Ok(())
}
