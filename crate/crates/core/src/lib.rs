//! Placement of component-based applications, modeled as structured VNF
//! forwarding graphs, onto hybrid cloud/fog infrastructures whose fog nodes
//! may move according to the random waypoint model.
//!
//! The crate is organized bottom-up:
//!
//! * [`vnffg`] request trees, predecessor relation, workload generator
//! * [`mobility`] stationary location densities and expectations over them
//! * [`infra`] nodes, location-dependent links, expected link metric cache
//! * [`evaluator`] makespan, cost, constraints and penalized fitness
//! * [`solvers`] tabu search, baselines and an exhaustive oracle
//! * [`harness`] experiment sweeps, documents and CSV output
//! * [`cli`] the `fogplace` command line

pub mod cli;
pub mod error;
pub mod evaluator;
pub mod harness;
pub mod infra;
pub mod mobility;
pub mod solvers;
pub mod units;
pub mod vnffg;

pub use error::{Error, Result};
