//! Experiment sweeps, CSV output and the mobility cross-check behind the
//! command line tool.

mod config;
mod documents;

use std::fs::File;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{ExperimentConfig, Normalization, SearchConfig, SolverKind, TierSet};
pub use documents::{parse_json, WorkloadDoc};

use crate::error::{Error, Result};
use crate::evaluator::{ObjectiveWeights, PenaltyScale, Placement, Problem};
use crate::infra::{build_scenario, Tier};
use crate::mobility::{cell_masses, histogram, simulate_rwp, LocationDensity, MobilityProfile, SAMPLES_PER_LEG};
use crate::solvers::{
    exhaustive_optimal, greedy_place, initial_placement, penalty_scale, psf_place, tabu_random_explore,
    tabu_search, ExhaustiveLimits, SolveResult, TabuParams,
};
use crate::vnffg::generate_workload;

/// One solver run at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub tiers: String,
    pub solver: String,
    pub seed: u64,
    pub alpha: f64,
    pub requests: usize,
    /// Fog `p_static`, empty when the scenario value was kept.
    pub p_static: Option<f64>,
    pub makespan_sum: f64,
    pub cost_sum: f64,
    pub deployment_cost: f64,
    pub objective: f64,
    pub fitness: f64,
    pub feasible: bool,
    pub wall_ms: f64,
    pub fog_usage_pct: f64,
    pub cloud_usage_pct: f64,
    pub makespan_scale: f64,
    pub cost_scale: f64,
    pub error: String,
}

/// Column order of result CSV files.
pub const RESULT_COLUMNS: [&str; 19] = [
    "scenario",
    "tiers",
    "solver",
    "seed",
    "alpha",
    "requests",
    "p_static",
    "makespan_sum",
    "cost_sum",
    "deployment_cost",
    "objective",
    "fitness",
    "feasible",
    "wall_ms",
    "fog_usage_pct",
    "cloud_usage_pct",
    "makespan_scale",
    "cost_scale",
    "error",
];

#[derive(Debug, Clone, Copy)]
struct Point {
    seed: u64,
    requests: usize,
    p_static: Option<f64>,
    tiers: TierSet,
    alpha: f64,
}

fn sweep_points(cfg: &ExperimentConfig) -> Vec<Point> {
    let p_static: Vec<Option<f64>> = if cfg.p_static.is_empty() {
        vec![None]
    } else {
        cfg.p_static.iter().map(|&p| Some(p)).collect()
    };
    let mut out = Vec::new();
    for &tiers in &cfg.tier_sets {
        for &requests in &cfg.requests {
            for &ps in &p_static {
                for &alpha in &cfg.alphas {
                    for &seed in &cfg.seeds {
                        out.push(Point {
                            seed,
                            requests,
                            p_static: ps,
                            tiers,
                            alpha,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Percentage of deployed processing units on fog and on cloud nodes.
pub fn resource_usage(problem: &Problem, p: &Placement) -> (f64, f64) {
    let (mut fog, mut cloud) = (0.0, 0.0);
    for (t, _, n) in p.deployments() {
        let v = problem.catalog()[t].resource_req;
        match problem.network().node(n).tier {
            Tier::Fog => fog += v,
            Tier::Cloud => cloud += v,
        }
    }
    let total = fog + cloud;
    if total == 0.0 {
        (0.0, 0.0)
    } else {
        (100.0 * fog / total, 100.0 * cloud / total)
    }
}

/// Normalizers of a problem: the makespan and cost sums of the seeded
/// initial placement, each replaced by 1 when not positive.
pub fn initial_normalizers(problem: &Problem, seed: u64) -> Result<(f64, f64)> {
    let parts = problem.objective_parts(&initial_placement(problem, seed))?;
    let pos = |v: f64| if v > 0.0 { v } else { 1.0 };
    Ok((pos(parts.makespan), pos(parts.comm_cost + parts.deployment_cost)))
}

/// Problem of one sweep point on the full network, plus the network
/// restricted to the point's tiers.
fn point_problems(cfg: &ExperimentConfig, pt: &Point) -> Result<(Problem, Problem)> {
    let mut doc = cfg.scenario_doc(pt.seed);
    if let Some(ps) = pt.p_static {
        doc.params.fog_p_static = ps;
        for n in &mut doc.nodes {
            if let (Tier::Fog, Some(m)) = (n.tier, n.mobility.as_mut()) {
                m.p_static = ps;
            }
        }
    }
    let net = build_scenario(&doc)?;
    let mut workload = cfg.workload.clone();
    workload.user_count = net.users().len();
    let w = generate_workload(pt.requests, pt.seed, &workload)?;
    let full = Problem::new(net, w.catalog, w.requests)?;
    let restricted = match pt.tiers {
        TierSet::Hybrid => full.clone(),
        t => full.with_network(full.network().restricted_to(t.tiers())?)?,
    };
    Ok((full, restricted))
}

impl ResultRow {
    /// Row with identifying columns set and every measurement missing.
    pub fn blank(scenario: &str, tiers: TierSet, solver: SolverKind, seed: u64, alpha: f64, requests: usize) -> Self {
        Self {
            scenario: scenario.into(),
            tiers: tiers.name().into(),
            solver: solver.name().into(),
            seed,
            alpha,
            requests,
            p_static: None,
            makespan_sum: f64::NAN,
            cost_sum: f64::NAN,
            deployment_cost: f64::NAN,
            objective: f64::NAN,
            fitness: f64::NAN,
            feasible: false,
            wall_ms: 0.0,
            fog_usage_pct: f64::NAN,
            cloud_usage_pct: f64::NAN,
            makespan_scale: f64::NAN,
            cost_scale: f64::NAN,
            error: String::new(),
        }
    }

    /// Fills the measurement columns from an evaluation of `placement`.
    pub fn measured(
        self,
        problem: &Problem,
        placement: &Placement,
        weights: &ObjectiveWeights,
        scale: PenaltyScale,
    ) -> Result<Self> {
        let rep = problem.evaluate(placement, weights, scale)?;
        let (fog, cloud) = resource_usage(problem, placement);
        Ok(Self {
            makespan_sum: rep.makespan_sum,
            cost_sum: rep.cost_sum,
            deployment_cost: rep.deployment_cost(),
            objective: rep.objective,
            fitness: rep.fitness,
            feasible: rep.feasible(),
            fog_usage_pct: fog,
            cloud_usage_pct: cloud,
            makespan_scale: weights.makespan_scale,
            cost_scale: weights.cost_scale,
            ..self
        })
    }
}

fn run_point(cfg: &ExperimentConfig, pt: &Point) -> Vec<ResultRow> {
    let scenario = match (&cfg.scenario, cfg.preset) {
        (None, Some(p)) => p.name(),
        _ => "custom",
    };
    let row = |solver: SolverKind| ResultRow {
        p_static: pt.p_static,
        ..ResultRow::blank(scenario, pt.tiers, solver, pt.seed, pt.alpha, pt.requests)
    };
    let setup = (|| -> Result<_> {
        let (full, problem) = point_problems(cfg, pt)?;
        let (ms, cs) = match cfg.normalization {
            Normalization::None => (1.0, 1.0),
            Normalization::Initial => initial_normalizers(&full, pt.seed)?,
        };
        let weights = ObjectiveWeights::normalized(pt.alpha, ms, cs)?;
        let scale = penalty_scale(&problem, &weights, pt.seed)?;
        Ok((problem, weights, scale))
    })();
    let (problem, weights, scale) = match setup {
        Ok(s) => s,
        Err(e) => {
            return cfg
                .solvers
                .iter()
                .map(|&s| ResultRow {
                    error: e.to_string(),
                    ..row(s)
                })
                .collect()
        }
    };
    let params = cfg.search.params(weights, pt.seed, scale);

    cfg.solvers
        .iter()
        .map(|&solver| {
            let start = Instant::now();
            let res = run_solver(solver, &problem, &params, scale)
                .and_then(|r| row(solver).measured(&problem, &r.placement, &weights, scale));
            let wall = start.elapsed().as_secs_f64() * 1e3;
            match res {
                Ok(r) => ResultRow {
                    wall_ms: if cfg.timing { wall } else { 0.0 },
                    ..r
                },
                Err(e) => ResultRow {
                    error: e.to_string(),
                    ..row(solver)
                },
            }
        })
        .collect()
}

/// Runs one solver on `problem`. PSF is evaluated under the true model.
pub fn run_solver(
    solver: SolverKind,
    problem: &Problem,
    params: &TabuParams,
    scale: PenaltyScale,
) -> Result<SolveResult> {
    let wrap = |placement: Placement, start: Instant| -> Result<SolveResult> {
        Ok(SolveResult {
            fitness: problem.fitness(&placement, &params.weights, scale)?,
            placement,
            trace: Vec::new(),
            evaluations: 1,
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        })
    };
    let params = TabuParams {
        penalty_scale: Some(scale),
        ..*params
    };
    match solver {
        SolverKind::Tscp => tabu_search(problem, &params),
        SolverKind::RandomExplore => tabu_random_explore(problem, &params),
        SolverKind::Greedy => wrap(greedy_place(problem), Instant::now()),
        SolverKind::Psf => psf_place(problem, &params),
        SolverKind::Optimal => exhaustive_optimal(problem, &params.weights, scale, &ExhaustiveLimits::default()),
    }
}

/// Runs every solver at every sweep point. Points run in parallel; rows come
/// back in sweep order (tier set, request count, `p_static`, alpha, seed,
/// solver). Failures are recorded in the `error` column.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let points = sweep_points(cfg);
    let rows: Vec<Vec<ResultRow>> = points.par_iter().map(|pt| run_point(cfg, pt)).collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Creates an output file. An existing file is an error unless `force`.
pub fn create_output(path: &Path, force: bool) -> Result<File> {
    if path.exists() && !force {
        return Err(Error::Io(format!(
            "{} already exists (use --force to overwrite)",
            path.display()
        )));
    }
    Ok(File::create(path)?)
}

/// Writes result rows with a header line. An existing file is an error
/// unless `force` is set.
pub fn emit_csv(rows: &[ResultRow], path: &Path, force: bool) -> Result<()> {
    write_results(rows, create_output(path, force)?)
}

pub fn write_results<W: std::io::Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(RESULT_COLUMNS)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Any serializable records to CSV, refusing to overwrite unless `force`.
pub fn write_records<T: Serialize>(records: &[T], path: &Path, force: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(create_output(path, force)?);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Mean of `f` over the rows of one solver matching `keep`, skipping failed
/// rows.
pub fn mean_by(rows: &[ResultRow], solver: SolverKind, keep: impl Fn(&ResultRow) -> bool, f: impl Fn(&ResultRow) -> f64) -> f64 {
    let v: Vec<f64> = rows
        .iter()
        .filter(|r| r.solver == solver.name() && r.error.is_empty() && keep(r))
        .map(f)
        .collect();
    v.iter().sum::<f64>() / v.len() as f64
}

/// One cell of the analytic vs simulated location grids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub row: usize,
    pub col: usize,
    pub analytic: f64,
    pub empirical: f64,
}

/// Analytic density against a Monte Carlo histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityCheck {
    pub cells: Vec<GridCell>,
    /// Total analytic mass of the grid.
    pub analytic_mass: f64,
    /// Sum of absolute cell-mass differences.
    pub l1_error: f64,
    pub mean_trajectory_length: f64,
    pub samples: usize,
}

/// Compares the stationary density of `profile` with about `samples`
/// simulated location samples on a `bins x bins` grid.
pub fn validate_mobility(profile: &MobilityProfile, samples: usize, bins: usize, seed: u64) -> Result<MobilityCheck> {
    profile.validate()?;
    if bins == 0 {
        return Err(Error::Domain("grid must have at least one bin".into()));
    }
    let legs = (samples as f64 / SAMPLES_PER_LEG).ceil() as usize;
    let sim = simulate_rwp(profile, legs, seed);
    let emp = histogram(&sim, bins);
    let ana = cell_masses(&LocationDensity::from_profile(profile), bins, 8);
    let cells: Vec<GridCell> = (0..bins * bins)
        .map(|k| GridCell {
            row: k / bins,
            col: k % bins,
            analytic: ana[k],
            empirical: emp[k],
        })
        .collect();
    Ok(MobilityCheck {
        analytic_mass: ana.iter().sum(),
        l1_error: ana.iter().zip(&emp).map(|(a, e)| (a - e).abs()).sum(),
        mean_trajectory_length: sim.mean_trajectory_length,
        samples: sim.len(),
        cells,
    })
}
