//! The four neighborhood moves, their target rules and exact undo.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluator::{Assignment, ObjectiveWeights, Placement, Problem};
use crate::infra::NodeId;
use crate::vnffg::TypeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    VnfReassign,
    BulkVnfReassign,
    RequestReassign,
    BulkRequestReassign,
}

impl MoveKind {
    pub const ALL: [MoveKind; 4] = [
        MoveKind::VnfReassign,
        MoveKind::BulkVnfReassign,
        MoveKind::RequestReassign,
        MoveKind::BulkRequestReassign,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::VnfReassign => "vnf_reassign",
            MoveKind::BulkVnfReassign => "bulk_vnf_reassign",
            MoveKind::RequestReassign => "request_reassign",
            MoveKind::BulkRequestReassign => "bulk_request_reassign",
        }
    }
}

/// What a move relocates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveSubject {
    /// One deployed instance.
    Instance(TypeId, usize),
    /// Every instance hosted on a node.
    Node(NodeId),
    /// The instance serving one type of one request.
    Request(usize, TypeId),
    /// Every request served by one instance.
    InstanceRequests(TypeId, usize),
}

/// Where a subject sits before or after a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Node(NodeId),
    Instance { instance: usize, node: NodeId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    pub kind: MoveKind,
    pub subject: MoveSubject,
    pub source: Location,
    pub target: Location,
}

/// Identity of a move for the tabu list: kind, subject and destination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TabuKey {
    kind: MoveKind,
    subject: MoveSubject,
    place: Place,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Place {
    Node(NodeId),
    Instance(usize),
}

fn place(l: Location) -> Place {
    match l {
        Location::Node(n) => Place::Node(n),
        Location::Instance { instance, .. } => Place::Instance(instance),
    }
}

impl Move {
    /// Key of this candidate.
    pub fn key(&self) -> TabuKey {
        TabuKey {
            kind: self.kind,
            subject: self.subject,
            place: place(self.target),
        }
    }

    /// Key of the move that would send the subject back to its source.
    pub fn reverse_key(&self) -> TabuKey {
        let subject = match (self.subject, self.target) {
            (MoveSubject::Node(_), Location::Node(to)) => MoveSubject::Node(to),
            (MoveSubject::InstanceRequests(t, _), Location::Instance { instance, .. }) => {
                MoveSubject::InstanceRequests(t, instance)
            }
            (s, _) => s,
        };
        TabuKey {
            kind: self.kind,
            subject,
            place: place(self.source),
        }
    }
}

/// How a move picks its destination among the capacity-respecting ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetRule {
    /// Lowest weighted local time and cost, ties to the lowest node id.
    BestScore,
    /// Uniformly at random.
    Random,
}

/// Changes made by [`apply_move`], in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Undo {
    deployed: Vec<(TypeId, usize, Option<NodeId>)>,
    assigned: Vec<(usize, TypeId, Option<Assignment>)>,
}

fn set_deployed(p: &mut Placement, u: &mut Undo, t: TypeId, i: usize, v: Option<NodeId>) {
    u.deployed.push((t, i, p.deployed[t][i]));
    p.deployed[t][i] = v;
}

fn set_assigned(p: &mut Placement, u: &mut Undo, r: usize, t: TypeId, v: Option<Assignment>) {
    u.assigned.push((r, t, p.assigned[r][t]));
    p.assigned[r][t] = v;
}

/// Restores the placement exactly as it was before the move.
pub fn revert(p: &mut Placement, undo: Undo) {
    for (r, t, v) in undo.assigned.into_iter().rev() {
        p.assigned[r][t] = v;
    }
    for (t, i, v) in undo.deployed.into_iter().rev() {
        p.deployed[t][i] = v;
    }
}

fn relocate_instance(p: &mut Placement, u: &mut Undo, t: TypeId, i: usize, to: NodeId) {
    set_deployed(p, u, t, i, Some(to));
    let users: Vec<usize> = p.users_of(t, i).collect();
    for r in users {
        set_assigned(p, u, r, t, Some(Assignment { instance: i, node: to }));
    }
}

fn point_to(p: &mut Placement, u: &mut Undo, r: usize, t: TypeId, instance: usize, node: NodeId) {
    if p.deployed[t][instance].is_none() {
        set_deployed(p, u, t, instance, Some(node));
    }
    set_assigned(p, u, r, t, Some(Assignment { instance, node }));
}

fn drop_if_orphaned(p: &mut Placement, u: &mut Undo, t: TypeId, i: usize) {
    if p.deployed[t][i].is_some() && p.users_of(t, i).next().is_none() {
        set_deployed(p, u, t, i, None);
    }
}

/// Applies `mv` and returns what is needed to revert it. Instances left
/// without any request are undeployed.
pub fn apply_move(p: &mut Placement, mv: &Move) -> Undo {
    let mut u = Undo::default();
    match (mv.subject, mv.target) {
        (MoveSubject::Instance(t, i), Location::Node(to)) => relocate_instance(p, &mut u, t, i, to),
        (MoveSubject::Node(from), Location::Node(to)) => {
            let hosted: Vec<(TypeId, usize)> = p
                .deployments()
                .filter(|&(_, _, n)| n == from)
                .map(|(t, i, _)| (t, i))
                .collect();
            for (t, i) in hosted {
                relocate_instance(p, &mut u, t, i, to);
            }
        }
        (MoveSubject::Request(r, t), Location::Instance { instance, node }) => {
            let old = p.assignment(r, t);
            point_to(p, &mut u, r, t, instance, node);
            if let Some(old) = old {
                drop_if_orphaned(p, &mut u, t, old.instance);
            }
        }
        (MoveSubject::InstanceRequests(t, from), Location::Instance { instance, node }) => {
            let users: Vec<usize> = p.users_of(t, from).collect();
            for r in users {
                point_to(p, &mut u, r, t, instance, node);
            }
            drop_if_orphaned(p, &mut u, t, from);
        }
        _ => unreachable!("inconsistent move {mv:?}"),
    }
    u
}

/// Processing units in use per node.
pub(crate) fn node_usage(problem: &Problem, p: &Placement) -> Vec<f64> {
    let mut used = vec![0.0; problem.network().len()];
    for (t, _, n) in p.deployments() {
        used[n] += problem.catalog()[t].resource_req;
    }
    used
}

/// Expected traffic a request sends into its instance of `t`.
pub(crate) fn request_load(problem: &Problem, r: usize, t: TypeId) -> f64 {
    let req = problem.request(r);
    let iot: f64 = req.iot_of(t).map(|l| l.traffic).sum();
    req.load_weight(t) * (req.traffic_in(t) + iot)
}

pub(crate) fn instance_load(problem: &Problem, p: &Placement, t: TypeId, i: usize) -> f64 {
    p.users_of(t, i).map(|r| request_load(problem, r, t)).sum()
}

fn instance_limit(problem: &Problem, t: TypeId) -> f64 {
    let ty = &problem.catalog()[t];
    ty.util_threshold * ty.capacity
}

/// Weighted time and cost of request `r` running `t` on `n`.
fn request_score(problem: &Problem, p: &Placement, w: &ObjectiveWeights, r: usize, t: TypeId, n: NodeId) -> f64 {
    match problem.leaf_metrics_at(p, r, t, n) {
        Ok(m) => {
            w.alpha * m.makespan() / w.makespan_scale + (1.0 - w.alpha) * m.comm_cost / w.cost_scale
        }
        Err(_) => f64::INFINITY,
    }
}

fn hosting_score(problem: &Problem, w: &ObjectiveWeights, t: TypeId, n: NodeId) -> f64 {
    let ty = &problem.catalog()[t];
    (1.0 - w.alpha) * problem.network().node(n).unit_cost * ty.resource_req / w.cost_scale
}

fn instance_score(problem: &Problem, p: &Placement, w: &ObjectiveWeights, t: TypeId, i: usize, n: NodeId) -> f64 {
    hosting_score(problem, w, t, n)
        + p.users_of(t, i)
            .map(|r| request_score(problem, p, w, r, t, n))
            .sum::<f64>()
}

/// Candidate destinations with scores, in increasing node id (then
/// instance) order.
type Scored = Vec<(Location, f64)>;

fn pick<R: Rng>(targets: Scored, rule: TargetRule, rng: &mut R) -> Option<Location> {
    match rule {
        TargetRule::BestScore => {
            let mut best: Option<(Location, f64)> = None;
            for (l, s) in targets {
                if best.is_none_or(|(_, b)| s < b) {
                    best = Some((l, s));
                }
            }
            best.map(|(l, _)| l)
        }
        TargetRule::Random => match targets.len() {
            0 => None,
            1 => Some(targets[0].0),
            k => Some(targets[rng.random_range(0..k)].0),
        },
    }
}

fn instance_targets(problem: &Problem, p: &Placement, w: &ObjectiveWeights, t: TypeId, i: usize, used: &[f64]) -> Scored {
    let from = p.deployed[t][i].expect("deployed");
    let need = problem.catalog()[t].resource_req;
    (0..problem.network().len())
        .filter(|&n| n != from && used[n] + need <= problem.network().node(n).usable_capacity())
        .map(|n| (Location::Node(n), instance_score(problem, p, w, t, i, n)))
        .collect()
}

fn node_targets(problem: &Problem, p: &Placement, w: &ObjectiveWeights, from: NodeId, used: &[f64]) -> Scored {
    let hosted: Vec<(TypeId, usize)> = p
        .deployments()
        .filter(|&(_, _, n)| n == from)
        .map(|(t, i, _)| (t, i))
        .collect();
    (0..problem.network().len())
        .filter(|&n| n != from && used[n] + used[from] <= problem.network().node(n).usable_capacity())
        .map(|n| {
            let s = hosted
                .iter()
                .map(|&(t, i)| instance_score(problem, p, w, t, i, n))
                .sum();
            (Location::Node(n), s)
        })
        .collect()
}

/// Existing instances of `t` other than `exclude` that can absorb `load`,
/// and the first free instance slot on every node with room for it except
/// the node of `exclude`. Scores are filled in by the caller.
fn instance_slots(
    problem: &Problem,
    p: &Placement,
    t: TypeId,
    exclude: usize,
    load: f64,
    used: &[f64],
) -> Scored {
    let here = p.deployed[t].get(exclude).copied().flatten();
    let mut out = Vec::new();
    let limit = instance_limit(problem, t);
    for (j, host) in p.deployed[t].iter().enumerate() {
        if j == exclude {
            continue;
        }
        if let Some(n) = host {
            if instance_load(problem, p, t, j) + load <= limit {
                out.push((Location::Instance { instance: j, node: *n }, 0.0));
            }
        }
    }
    if let Some(free) = p.deployed[t].iter().position(|h| h.is_none()) {
        let need = problem.catalog()[t].resource_req;
        for n in 0..problem.network().len() {
            // A fresh copy next to the current instance changes nothing.
            if Some(n) != here && used[n] + need <= problem.network().node(n).usable_capacity() {
                out.push((Location::Instance { instance: free, node: n }, 0.0));
            }
        }
    }
    // By node id; on one node existing instances before the fresh slot.
    out.sort_by_key(|(l, _)| match l {
        Location::Instance { instance, node } => (*node, p.deployed[t][*instance].is_none(), *instance),
        Location::Node(n) => (*n, false, 0),
    });
    out
}

fn request_targets(problem: &Problem, p: &Placement, w: &ObjectiveWeights, r: usize, t: TypeId, used: &[f64]) -> Scored {
    let current = p.assignment(r, t).map(|a| a.instance).unwrap_or(usize::MAX);
    let load = request_load(problem, r, t);
    let mut out = instance_slots(problem, p, t, current, load, used);
    for (l, s) in &mut out {
        let Location::Instance { instance, node } = *l else { unreachable!() };
        let fresh = p.deployed[t][instance].is_none();
        *s = request_score(problem, p, w, r, t, node)
            + if fresh { hosting_score(problem, w, t, node) } else { 0.0 };
    }
    out
}

fn bulk_request_targets(problem: &Problem, p: &Placement, w: &ObjectiveWeights, t: TypeId, from: usize, used: &[f64]) -> Scored {
    let load = instance_load(problem, p, t, from);
    let users: Vec<usize> = p.users_of(t, from).collect();
    let mut out = instance_slots(problem, p, t, from, load, used);
    for (l, s) in &mut out {
        let Location::Instance { instance, node } = *l else { unreachable!() };
        let fresh = p.deployed[t][instance].is_none();
        *s = users
            .iter()
            .map(|&r| request_score(problem, p, w, r, t, node))
            .sum::<f64>()
            + if fresh { hosting_score(problem, w, t, node) } else { 0.0 };
    }
    out
}

/// Draws `count` candidate moves from `p`. Each candidate picks a kind
/// uniformly and a random subject, then a destination by `rule`. Draws whose
/// subject has no capacity-respecting destination and repeats of an earlier
/// candidate are dropped.
pub fn propose_moves<R: Rng>(
    problem: &Problem,
    p: &Placement,
    weights: &ObjectiveWeights,
    rule: TargetRule,
    rng: &mut R,
    count: usize,
) -> Result<Vec<Move>> {
    let used = node_usage(problem, p);
    let instances: Vec<(TypeId, usize, NodeId)> = p.deployments().collect();
    let mut hosts: Vec<NodeId> = instances.iter().map(|x| x.2).collect();
    hosts.sort_unstable();
    hosts.dedup();
    let pairs: Vec<(usize, TypeId)> = problem
        .requests()
        .iter()
        .enumerate()
        .flat_map(|(r, req)| req.vnfs().iter().map(move |&t| (r, t)))
        .filter(|&(r, t)| p.assignment(r, t).is_some())
        .collect();
    let served: Vec<(TypeId, usize, NodeId)> = instances
        .iter()
        .copied()
        .filter(|&(t, i, _)| p.users_of(t, i).next().is_some())
        .collect();

    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let kind = MoveKind::ALL[rng.random_range(0..MoveKind::ALL.len())];
        let mv = match kind {
            MoveKind::VnfReassign => instances.choose(rng).and_then(|&(t, i, n)| {
                let targets = instance_targets(problem, p, weights, t, i, &used);
                pick(targets, rule, rng).map(|target| Move {
                    kind,
                    subject: MoveSubject::Instance(t, i),
                    source: Location::Node(n),
                    target,
                })
            }),
            MoveKind::BulkVnfReassign => hosts.choose(rng).and_then(|&n| {
                let targets = node_targets(problem, p, weights, n, &used);
                pick(targets, rule, rng).map(|target| Move {
                    kind,
                    subject: MoveSubject::Node(n),
                    source: Location::Node(n),
                    target,
                })
            }),
            MoveKind::RequestReassign => pairs.choose(rng).and_then(|&(r, t)| {
                let a = p.assignment(r, t).expect("assigned");
                let targets = request_targets(problem, p, weights, r, t, &used);
                pick(targets, rule, rng).map(|target| Move {
                    kind,
                    subject: MoveSubject::Request(r, t),
                    source: Location::Instance {
                        instance: a.instance,
                        node: a.node,
                    },
                    target,
                })
            }),
            MoveKind::BulkRequestReassign => served.choose(rng).and_then(|&(t, i, n)| {
                let targets = bulk_request_targets(problem, p, weights, t, i, &used);
                pick(targets, rule, rng).map(|target| Move {
                    kind,
                    subject: MoveSubject::InstanceRequests(t, i),
                    source: Location::Instance { instance: i, node: n },
                    target,
                })
            }),
        };
        if let Some(mv) = mv {
            if !out.contains(&mv) {
                out.push(mv);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoMoveAvailable);
    }
    Ok(out)
}
