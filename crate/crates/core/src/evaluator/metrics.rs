//! Per-VNF and per-request makespan and communication cost.

use super::placement::Placement;
use super::problem::{Problem, Step};
use crate::error::{Error, Result};
use crate::infra::NodeId;
use crate::vnffg::{expected_loop_iterations, TypeId};

/// Processing time, communication time and communication cost of a VNF or
/// of a sub-structure.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub proc_time: f64,
    pub comm_time: f64,
    pub comm_cost: f64,
}

impl Metrics {
    pub fn makespan(&self) -> f64 {
        self.proc_time + self.comm_time
    }
}

/// Sub-structure kinds with their parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block<'a> {
    Seq,
    Par,
    Sel(&'a [f64]),
    /// Loop probability `q`.
    Loop(f64),
}

/// Combines the metrics of a block's children: sequences add up, parallel
/// blocks take the slowest child but pay for all, selections weight by the
/// selection probabilities and loops repeat the sequence `q / (1 - q)`
/// times.
pub fn aggregate(block: Block<'_>, children: &[Metrics]) -> Result<Metrics> {
    let sum = |w: f64| {
        children.iter().fold(Metrics::default(), |acc, c| Metrics {
            proc_time: acc.proc_time + c.proc_time * w,
            comm_time: acc.comm_time + c.comm_time * w,
            comm_cost: acc.comm_cost + c.comm_cost * w,
        })
    };
    match block {
        Block::Seq => Ok(sum(1.0)),
        Block::Loop(q) => Ok(sum(expected_loop_iterations(q)?)),
        Block::Par => Ok(children.iter().fold(Metrics::default(), |acc, c| Metrics {
            proc_time: acc.proc_time.max(c.proc_time),
            comm_time: acc.comm_time.max(c.comm_time),
            comm_cost: acc.comm_cost + c.comm_cost,
        })),
        Block::Sel(h) => {
            if h.len() != children.len() {
                return Err(Error::Domain(format!(
                    "{} selection probabilities for {} children",
                    h.len(),
                    children.len()
                )));
            }
            Ok(children
                .iter()
                .zip(h)
                .fold(Metrics::default(), |acc, (c, &h)| Metrics {
                    proc_time: acc.proc_time + h * c.proc_time,
                    comm_time: acc.comm_time + h * c.comm_time,
                    comm_cost: acc.comm_cost + h * c.comm_cost,
                }))
        }
    }
}

fn fold_into(stack: &mut Vec<Metrics>, arity: usize, block: Block<'_>) -> Result<()> {
    let start = stack.len() - arity;
    let m = aggregate(block, &stack[start..])?;
    stack.truncate(start);
    stack.push(m);
    Ok(())
}

impl Problem {
    /// Time to process the incoming traffic of `t` at its host.
    pub fn vnf_processing_time(&self, p: &Placement, r: usize, t: TypeId) -> Result<f64> {
        let n = p.node_of(r, t)?;
        Ok(self.processing_time_at(r, t, n))
    }

    pub(crate) fn processing_time_at(&self, r: usize, t: TypeId, n: NodeId) -> f64 {
        self.request(r).traffic_in(t) * self.network().node(n).proc_delay(t)
    }

    /// Slower of receiving from all immediate predecessors and exchanging
    /// with all IoT users.
    pub fn vnf_communication_time(&self, p: &Placement, r: usize, t: TypeId) -> Result<f64> {
        Ok(self.leaf_metrics_at(p, r, t, p.node_of(r, t)?)?.comm_time)
    }

    /// Cost of receiving from all immediate predecessors plus exchanging with
    /// all IoT users.
    pub fn vnf_communication_cost(&self, p: &Placement, r: usize, t: TypeId) -> Result<f64> {
        Ok(self.leaf_metrics_at(p, r, t, p.node_of(r, t)?)?.comm_cost)
    }

    /// Metrics of `t` in request `r` if it ran on `n`, predecessors where `p`
    /// puts them.
    pub fn leaf_metrics_at(&self, p: &Placement, r: usize, t: TypeId, n: NodeId) -> Result<Metrics> {
        let req = self.request(r);
        let a = req.traffic_in(t);
        let mut ip_time = 0.0;
        let mut cost = 0.0;
        for &pred in req.immediate_predecessors(t)? {
            let link = self.cache().between(n, p.node_of(r, pred)?);
            ip_time += link.delay(a);
            cost += link.cost(a);
        }
        let mut iot_time = 0.0;
        for l in req.iot_of(t) {
            let link = self.cache().to_user(n, l.user);
            iot_time += link.delay(l.traffic);
            cost += link.cost(l.traffic);
        }
        Ok(Metrics {
            proc_time: self.processing_time_at(r, t, n),
            comm_time: ip_time.max(iot_time),
            comm_cost: cost,
        })
    }

    /// Root metrics of request `r`, aggregated bottom-up.
    pub fn request_metrics(&self, p: &Placement, r: usize) -> Result<Metrics> {
        let mut stack: Vec<Metrics> = Vec::new();
        for step in self.plan(r) {
            match step {
                Step::Leaf(t) => {
                    let n = p.node_of(r, *t)?;
                    stack.push(self.leaf_metrics_at(p, r, *t, n)?);
                }
                Step::Seq(k) => fold_into(&mut stack, *k, Block::Seq)?,
                Step::Par(k) => fold_into(&mut stack, *k, Block::Par)?,
                Step::Sel(h) => fold_into(&mut stack, h.len(), Block::Sel(h))?,
                Step::Loop(k, q) => fold_into(&mut stack, *k, Block::Loop(*q))?,
            }
        }
        Ok(stack.pop().expect("nonempty plan"))
    }

    /// Processing plus communication time of the root.
    pub fn request_makespan(&self, p: &Placement, r: usize) -> Result<f64> {
        Ok(self.request_metrics(p, r)?.makespan())
    }

    /// Communication cost of the root.
    pub fn request_cost(&self, p: &Placement, r: usize) -> Result<f64> {
        Ok(self.request_metrics(p, r)?.comm_cost)
    }

    /// License and hosting cost of every deployed instance.
    pub fn deployment_cost(&self, p: &Placement) -> (f64, f64) {
        let mut license = 0.0;
        let mut hosting = 0.0;
        for (t, _, n) in p.deployments() {
            let ty = &self.catalog()[t];
            license += ty.license_cost;
            hosting += self.network().node(n).unit_cost * ty.resource_req;
        }
        (license, hosting)
    }
}
