use std::collections::HashMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::baselines::initial_placement;
use super::moves::{apply_move, propose_moves, revert, TabuKey, TargetRule};
use crate::error::{Error, Result};
use crate::evaluator::{ObjectiveWeights, PenaltyScale, Placement, Problem};

/// Tabu search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TabuParams {
    /// Iterations a reversing move stays forbidden.
    pub tabu_tenure: usize,
    /// Consecutive non-improving iterations tolerated before stopping.
    pub stop_after: usize,
    /// Candidate moves drawn per iteration.
    pub neighborhood_size: usize,
    pub weights: ObjectiveWeights,
    pub seed: u64,
    /// Penalty scale shared with other solvers; defaults to the objective of
    /// the initial placement.
    pub penalty_scale: Option<PenaltyScale>,
}

impl TabuParams {
    pub fn new(alpha: f64, seed: u64) -> Result<Self> {
        Ok(Self {
            tabu_tenure: 60,
            stop_after: 20,
            neighborhood_size: 16,
            weights: ObjectiveWeights::new(alpha)?,
            seed,
            penalty_scale: None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.tabu_tenure == 0 || self.stop_after == 0 || self.neighborhood_size == 0 {
            return Err(Error::Domain(
                "tabu tenure, stop rule and neighborhood size must be >= 1".into(),
            ));
        }
        ObjectiveWeights::normalized(
            self.weights.alpha,
            self.weights.makespan_scale,
            self.weights.cost_scale,
        )?;
        Ok(())
    }
}

/// One iteration of a search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub fitness: f64,
    pub best: f64,
    pub move_kind: String,
    pub elapsed_ms: f64,
}

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub placement: Placement,
    pub fitness: f64,
    pub trace: Vec<TraceRow>,
    /// Placements evaluated.
    pub evaluations: usize,
    pub wall_ms: f64,
}

impl SolveResult {
    /// Writes the trace as CSV.
    pub fn write_trace<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.trace {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scale of the penalty coefficients: the objective of the seeded initial
/// placement.
pub fn penalty_scale(problem: &Problem, weights: &ObjectiveWeights, seed: u64) -> Result<PenaltyScale> {
    let s = problem.objective(&initial_placement(problem, seed), weights)?;
    Ok(PenaltyScale(if s > 0.0 { s } else { 1.0 }))
}

/// Tabu search with makespan/cost driven move targets.
pub fn tabu_search(problem: &Problem, params: &TabuParams) -> Result<SolveResult> {
    run(problem, params, TargetRule::BestScore)
}

/// Tabu search whose moves pick their destination at random.
pub fn tabu_random_explore(problem: &Problem, params: &TabuParams) -> Result<SolveResult> {
    run(problem, params, TargetRule::Random)
}

pub(crate) fn run(problem: &Problem, params: &TabuParams, rule: TargetRule) -> Result<SolveResult> {
    params.validate()?;
    let start = Instant::now();
    let w = params.weights;
    let scale = match params.penalty_scale {
        Some(s) => s,
        None => penalty_scale(problem, &w, params.seed)?,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let mut current = initial_placement(problem, params.seed);
    let mut current_fit = problem.fitness(&current, &w, scale)?;
    let mut best = current.clone();
    let mut best_fit = current_fit;
    let mut evaluations = 1;
    let mut trace = vec![TraceRow {
        iteration: 0,
        fitness: current_fit,
        best: best_fit,
        move_kind: String::new(),
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }];

    // Reverse key -> last iteration at which it is still tabu.
    let mut tabu: HashMap<TabuKey, usize> = HashMap::new();
    let mut j = 0;
    let mut iteration = 0;
    while j <= params.stop_after {
        iteration += 1;
        tabu.retain(|_, until| *until >= iteration);

        let candidates = match propose_moves(problem, &current, &w, rule, &mut rng, params.neighborhood_size) {
            Ok(c) => c,
            Err(Error::NoMoveAvailable) => Vec::new(),
            Err(e) => return Err(e),
        };
        let mut chosen: Option<(usize, f64)> = None;
        for (k, mv) in candidates.iter().enumerate() {
            let undo = apply_move(&mut current, mv);
            let fit = problem.fitness(&current, &w, scale)?;
            revert(&mut current, undo);
            evaluations += 1;
            let admissible = !tabu.contains_key(&mv.key()) || fit < best_fit;
            if admissible && chosen.is_none_or(|(_, f)| fit < f) {
                chosen = Some((k, fit));
            }
        }

        j += 1;
        let mut kind = "";
        if let Some((k, fit)) = chosen {
            let mv = candidates[k];
            if tabu.contains_key(&mv.key()) {
                // Aspiration: the move is released and its reverse re-enters
                // with a fresh tenure.
                tabu.remove(&mv.key());
            }
            tabu.insert(mv.reverse_key(), iteration + params.tabu_tenure);
            apply_move(&mut current, &mv);
            current_fit = fit;
            kind = mv.kind.name();
            if fit < best_fit {
                best = current.clone();
                best_fit = fit;
                j = 0;
            }
        }
        trace.push(TraceRow {
            iteration,
            fitness: current_fit,
            best: best_fit,
            move_kind: kind.to_string(),
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    Ok(SolveResult {
        placement: best,
        fitness: best_fit,
        trace,
        evaluations,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

