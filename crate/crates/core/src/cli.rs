//! The `fogplace` command line.
//!
//! Exit codes: 0 on success, 1 on runtime errors, 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{ObjectiveWeights, Placement, Problem};
use crate::harness::{
    create_output, emit_csv, initial_normalizers, parse_json, run_experiment, run_solver, validate_mobility,
    write_records, ExperimentConfig, Normalization, ResultRow, SearchConfig, SolverKind, TierSet, WorkloadDoc,
};
use crate::infra::{build_scenario, NetworkModel, Preset, ScenarioDoc};
use crate::mobility::{InitDist, MobilityProfile};
use crate::solvers::{exhaustive_optimal, penalty_scale, tabu_search, tiny_problem, ExhaustiveLimits};
use crate::vnffg::{generate_workload, Workload, WorkloadParams};

#[derive(Debug, Parser)]
#[command(name = "fogplace", version, about = "Component placement on hybrid cloud/fog networks")]
pub struct Cli {
    /// Random seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Weight of makespan against cost, in [0, 1].
    #[arg(long, global = true, value_parser = parse_alpha)]
    pub alpha: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Quadrature grid size per axis.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub grid: Option<u32>,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a workload and write it to `workload.json`.
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long, default_value_t = 15)]
        requests: usize,
        /// Generator ranges as JSON.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Run one solver; writes `result.csv`, `trace.csv` and `placement.json`.
    Solve {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        workload: WorkloadArgs,
        #[arg(long, value_parser = parse_solver, default_value = "tscp")]
        solver: SolverKind,
        #[arg(long, value_parser = parse_normalization, default_value = "initial")]
        normalization: Normalization,
        #[arg(long, default_value_t = 60)]
        tenure: usize,
        #[arg(long, default_value_t = 20)]
        stop_after: usize,
        #[arg(long, default_value_t = 16)]
        neighborhood: usize,
    },
    /// Run an experiment config; writes `results.csv`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Score a placement; writes `evaluation.csv`.
    Evaluate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        workload: WorkloadArgs,
        #[arg(long)]
        placement: PathBuf,
        #[arg(long, value_parser = parse_normalization, default_value = "initial")]
        normalization: Normalization,
    },
    /// Analytic against simulated location density; writes `density.csv`.
    ValidateMobility {
        /// Location samples, e.g. `1e6`.
        #[arg(long, value_parser = parse_count, default_value = "1e6")]
        samples: usize,
        #[arg(long, default_value_t = 32)]
        bins: usize,
        #[arg(long, default_value_t = 0.5)]
        p_static: f64,
        #[arg(long, default_value_t = 0.01)]
        velocity: f64,
        #[arg(long, default_value_t = 20.0)]
        pause: f64,
    },
    /// Exhaustive optimum against tabu search on a tiny random instance;
    /// writes `oracle.csv`.
    Oracle,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_parser = parse_preset, conflicts_with = "scenario")]
    pub preset: Option<Preset>,
    /// Scenario document.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WorkloadArgs {
    /// Workload document written by `generate`.
    #[arg(long, conflicts_with = "requests")]
    pub workload: Option<PathBuf>,
    /// Requests to draw when no workload file is given.
    #[arg(long)]
    pub requests: Option<usize>,
}

fn parse_alpha(s: &str) -> std::result::Result<f64, String> {
    let a: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&a) {
        Ok(a)
    } else {
        Err("alpha must lie in [0, 1]".into())
    }
}

fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e12 {
        Ok(v as usize)
    } else {
        Err("expected a positive whole number".into())
    }
}

fn parse_solver(s: &str) -> std::result::Result<SolverKind, String> {
    SolverKind::parse(s).map_err(|_| {
        let names: Vec<_> = SolverKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown solver `{s}` (expected one of {})", names.join(", "))
    })
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    Preset::parse(s).map_err(|_| format!("unknown preset `{s}` (expected topology-10 or topology-20)"))
}

fn parse_normalization(s: &str) -> std::result::Result<Normalization, String> {
    match s {
        "initial" => Ok(Normalization::Initial),
        "none" => Ok(Normalization::None),
        _ => Err(format!("unknown normalization `{s}` (expected initial or none)")),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str, force: bool) -> Result<()> {
    let mut f = create_output(path, force)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

impl Cli {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(1)
    }

    fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(0.5)
    }

    fn output(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }

    fn scenario(&self, args: &ScenarioArgs) -> Result<(String, NetworkModel)> {
        let (name, mut doc) = match &args.scenario {
            Some(path) => ("custom".to_string(), ScenarioDoc::from_json(&read(path)?)?),
            None => {
                let p = args.preset.unwrap_or(Preset::Topology10);
                (p.name().to_string(), ScenarioDoc::preset(p, self.seed()))
            }
        };
        if let Some(g) = self.grid {
            doc.quadrature_grid = Some(g as usize);
        }
        Ok((name, build_scenario(&doc)?))
    }

    fn workload(&self, args: &WorkloadArgs, net: &NetworkModel) -> Result<Workload> {
        match &args.workload {
            Some(path) => WorkloadDoc::from_json(&read(path)?)?.build(),
            None => {
                let params = WorkloadParams {
                    user_count: net.users().len(),
                    ..WorkloadParams::default()
                };
                generate_workload(args.requests.unwrap_or(15), self.seed(), &params)
            }
        }
    }

    fn weights(&self, problem: &Problem, normalization: Normalization) -> Result<ObjectiveWeights> {
        let (ms, cs) = match normalization {
            Normalization::None => (1.0, 1.0),
            Normalization::Initial => initial_normalizers(problem, self.seed())?,
        };
        ObjectiveWeights::normalized(self.alpha(), ms, cs)
    }
}

#[derive(Serialize)]
struct OracleRow {
    seed: u64,
    solver: &'static str,
    fitness: f64,
    feasible: bool,
    evaluations: usize,
}

fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate {
            scenario,
            requests,
            params,
        } => {
            let (_, net) = cli.scenario(scenario)?;
            let mut p: WorkloadParams = match params {
                Some(path) => parse_json(&read(path)?)?,
                None => WorkloadParams::default(),
            };
            p.user_count = net.users().len();
            let w = generate_workload(*requests, cli.seed(), &p)?;
            let path = cli.output("workload.json")?;
            write_text(&path, &WorkloadDoc::from_workload(&w).to_json(), cli.force)?;
            println!("wrote {} requests to {}", w.requests.len(), path.display());
        }
        Command::Solve {
            scenario,
            workload,
            solver,
            normalization,
            tenure,
            stop_after,
            neighborhood,
        } => {
            let (name, net) = cli.scenario(scenario)?;
            let w = cli.workload(workload, &net)?;
            let problem = Problem::new(net, w.catalog, w.requests)?;
            let weights = cli.weights(&problem, *normalization)?;
            let scale = penalty_scale(&problem, &weights, cli.seed())?;
            let search = SearchConfig {
                tabu_tenure: *tenure,
                stop_after: *stop_after,
                neighborhood_size: *neighborhood,
            };
            let params = search.params(weights, cli.seed(), scale);
            params.validate()?;
            let res = run_solver(*solver, &problem, &params, scale)?;
            let row = ResultRow {
                wall_ms: res.wall_ms,
                ..ResultRow::blank(&name, TierSet::Hybrid, *solver, cli.seed(), cli.alpha(), problem.requests().len())
            }
            .measured(&problem, &res.placement, &weights, scale)?;
            emit_csv(std::slice::from_ref(&row), &cli.output("result.csv")?, cli.force)?;
            write_records(&res.trace, &cli.output("trace.csv")?, cli.force)?;
            write_text(&cli.output("placement.json")?, &res.placement.to_json(), cli.force)?;
            println!(
                "{}: fitness {:.6} objective {:.6} feasible {} fog {:.1}%",
                solver.name(),
                row.fitness,
                row.objective,
                row.feasible,
                row.fog_usage_pct
            );
        }
        Command::Sweep { config } => {
            let mut cfg = ExperimentConfig::from_json(&read(config)?)?;
            if let Some(s) = cli.seed {
                cfg.seeds = vec![s];
            }
            if let Some(a) = cli.alpha {
                cfg.alphas = vec![a];
            }
            if let Some(g) = cli.grid {
                cfg.quadrature_grid = Some(g as usize);
            }
            let rows = run_experiment(&cfg)?;
            let path = cli.output("results.csv")?;
            emit_csv(&rows, &path, cli.force)?;
            let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
            println!("wrote {} rows to {} ({failed} failed)", rows.len(), path.display());
        }
        Command::Evaluate {
            scenario,
            workload,
            placement,
            normalization,
        } => {
            let (_, net) = cli.scenario(scenario)?;
            let w = cli.workload(workload, &net)?;
            let problem = Problem::new(net, w.catalog, w.requests)?;
            let p = Placement::from_json(&read(placement)?)?;
            p.check_shape(problem.catalog(), problem.requests().len())?;
            let weights = cli.weights(&problem, *normalization)?;
            let scale = penalty_scale(&problem, &weights, cli.seed())?;
            let rep = problem.evaluate(&p, &weights, scale)?;
            write_records(&[rep.record()], &cli.output("evaluation.csv")?, cli.force)?;
            println!(
                "makespan {:.6} cost {:.6} deployment {:.6} objective {:.6} fitness {:.6} violations {}",
                rep.makespan_sum,
                rep.cost_sum,
                rep.deployment_cost(),
                rep.objective,
                rep.fitness,
                rep.violations.len()
            );
        }
        Command::ValidateMobility {
            samples,
            bins,
            p_static,
            velocity,
            pause,
        } => {
            let profile = MobilityProfile::new(*p_static, *velocity, *pause, InitDist::Uniform)?;
            let check = validate_mobility(&profile, *samples, *bins, cli.seed())?;
            write_records(&check.cells, &cli.output("density.csv")?, cli.force)?;
            println!(
                "samples {} analytic mass {:.6} l1 error {:.6} mean trajectory length {:.6}",
                check.samples, check.analytic_mass, check.l1_error, check.mean_trajectory_length
            );
        }
        Command::Oracle => {
            let problem = tiny_problem(cli.seed())?;
            let weights = cli.weights(&problem, Normalization::Initial)?;
            let scale = penalty_scale(&problem, &weights, cli.seed())?;
            let exact = exhaustive_optimal(&problem, &weights, scale, &ExhaustiveLimits::default())?;
            let tabu = tabu_search(&problem, &SearchConfig::default().params(weights, cli.seed(), scale))?;
            let feasible = |p: &Placement| problem.check_constraints(p).is_empty();
            let rows = [
                OracleRow {
                    seed: cli.seed(),
                    solver: SolverKind::Optimal.name(),
                    fitness: exact.fitness,
                    feasible: feasible(&exact.placement),
                    evaluations: exact.evaluations,
                },
                OracleRow {
                    seed: cli.seed(),
                    solver: SolverKind::Tscp.name(),
                    fitness: tabu.fitness,
                    feasible: feasible(&tabu.placement),
                    evaluations: tabu.evaluations,
                },
            ];
            write_records(&rows, &cli.output("oracle.csv")?, cli.force)?;
            println!(
                "optimal {:.6} ({} placements) tabu {:.6} gap {:.3}%",
                exact.fitness,
                exact.evaluations,
                tabu.fitness,
                100.0 * (tabu.fitness - exact.fitness) / exact.fitness.abs().max(f64::MIN_POSITIVE)
            );
        }
    }
    Ok(())
}
