//! Tabu search against the exact optimum on tiny random instances.
//!
//! cargo run --release --example exhaustive_oracle

use fogplace::evaluator::ObjectiveWeights;
use fogplace::harness::initial_normalizers;
use fogplace::solvers::{exhaustive_optimal, penalty_scale, tabu_search, tiny_problem, ExhaustiveLimits, TabuParams};

fn main() -> fogplace::error::Result<()> {
    for seed in 0..8 {
        let problem = tiny_problem(seed)?;
        let (ms, cs) = initial_normalizers(&problem, seed)?;
        let weights = ObjectiveWeights::normalized(0.5, ms, cs)?;
        let scale = penalty_scale(&problem, &weights, seed)?;
        let exact = exhaustive_optimal(&problem, &weights, scale, &ExhaustiveLimits::default())?;
        let params = TabuParams {
            weights,
            penalty_scale: Some(scale),
            ..TabuParams::new(0.5, seed)?
        };
        let tabu = tabu_search(&problem, &params)?;
        println!(
            "seed {seed}: {} nodes, {} requests, optimum {:.5} over {:>6} placements, tabu {:.5} ({:+.2}%)",
            problem.network().len(),
            problem.requests().len(),
            exact.fitness,
            exact.evaluations,
            tabu.fitness,
            100.0 * (tabu.fitness / exact.fitness - 1.0)
        );
    }
    Ok(())
}
