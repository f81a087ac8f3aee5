#![allow(dead_code)]

use std::collections::BTreeSet;

use fogplace::evaluator::{Placement, Problem};
use fogplace::units::BITS_PER_BYTE;
use fogplace::vnffg::{expected_loop_iterations, GraphNode, TypeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (processing time, communication time, communication cost)
pub type Triple = (f64, f64, f64);

/// Leaves a block hands its output from.
fn exits(node: &GraphNode) -> BTreeSet<TypeId> {
    match node {
        GraphNode::Leaf { vnf } => BTreeSet::from([*vnf]),
        GraphNode::Seq { children } | GraphNode::Loop { children, .. } => exits(children.last().unwrap()),
        GraphNode::Par { children } | GraphNode::Sel { children, .. } => children.iter().flat_map(exits).collect(),
    }
}

fn contains(node: &GraphNode, t: TypeId) -> bool {
    match node {
        GraphNode::Leaf { vnf } => *vnf == t,
        _ => node.children().iter().any(|c| contains(c, t)),
    }
}

/// Predecessors of `t`: exits of the sibling right before the branch holding
/// `t` in the innermost sequence where that branch is not first.
pub fn predecessors(root: &GraphNode, t: TypeId) -> BTreeSet<TypeId> {
    let mut found = BTreeSet::new();
    let mut node = root;
    while !node.is_leaf() {
        let children = node.children();
        let k = children.iter().position(|c| contains(c, t)).unwrap();
        if matches!(node, GraphNode::Seq { .. } | GraphNode::Loop { .. }) && k > 0 {
            found = exits(&children[k - 1]);
        }
        node = &children[k];
    }
    found
}

fn leaf(problem: &Problem, p: &Placement, r: usize, t: TypeId) -> Triple {
    let req = problem.request(r);
    let n = p.assignment(r, t).unwrap().node;
    let a = req.traffic_map()[&t];
    let proc = a * problem.network().node(n).proc_delay(t);
    let mut from_preds = 0.0;
    let mut cost = 0.0;
    for q in predecessors(req.root(), t) {
        let m = p.assignment(r, q).unwrap().node;
        let e = problem.cache().between(n, m);
        from_preds += a * BITS_PER_BYTE * e.inv_bandwidth + e.latency;
        cost += a * e.unit_cost;
    }
    let mut with_users = 0.0;
    for l in req.iot().iter().filter(|l| l.vnf == t) {
        let e = problem.cache().to_user(n, l.user);
        with_users += l.traffic * BITS_PER_BYTE * e.inv_bandwidth + e.latency;
        cost += l.traffic * e.unit_cost;
    }
    (proc, f64::max(from_preds, with_users), cost)
}

fn eval(problem: &Problem, p: &Placement, r: usize, node: &GraphNode) -> Triple {
    let kids = |cs: &[GraphNode]| cs.iter().map(|c| eval(problem, p, r, c)).collect::<Vec<_>>();
    match node {
        GraphNode::Leaf { vnf } => leaf(problem, p, r, *vnf),
        GraphNode::Seq { children } => {
            let v = kids(children);
            let mut s: Triple = (0.0, 0.0, 0.0);
            for x in v {
                s = (s.0 + x.0, s.1 + x.1, s.2 + x.2);
            }
            s
        }
        GraphNode::Par { children } => {
            let v = kids(children);
            let mut s: Triple = (0.0, 0.0, 0.0);
            for x in v {
                s = (s.0.max(x.0), s.1.max(x.1), s.2 + x.2);
            }
            s
        }
        GraphNode::Sel { children, sel_probs } => {
            let v = kids(children);
            let mut s: Triple = (0.0, 0.0, 0.0);
            for (x, h) in v.into_iter().zip(sel_probs) {
                s = (s.0 + h * x.0, s.1 + h * x.1, s.2 + h * x.2);
            }
            s
        }
        GraphNode::Loop { children, loop_prob } => {
            let w = expected_loop_iterations(*loop_prob).unwrap();
            let v = kids(children);
            let mut s: Triple = (0.0, 0.0, 0.0);
            for x in v {
                s = (s.0 + x.0 * w, s.1 + x.1 * w, s.2 + x.2 * w);
            }
            s
        }
    }
}

/// Straightforward recursive evaluation of request `r`.
pub fn naive_request(problem: &Problem, p: &Placement, r: usize) -> Triple {
    eval(problem, p, r, problem.request(r).root())
}

/// Deploys every instance on a random node and assigns each request to a
/// random instance.
pub fn random_placement(problem: &Problem, seed: u64) -> Placement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = problem.network().len();
    let mut p = Placement::empty(problem.catalog(), problem.requests().len());
    for t in 0..problem.catalog().len() {
        for i in 0..p.deployed[t].len() {
            p.deploy(t, i, rng.random_range(0..nodes));
        }
    }
    for r in 0..problem.requests().len() {
        for &t in problem.request(r).required_types() {
            let i = rng.random_range(0..p.deployed[t].len());
            p.assign(r, t, i);
        }
    }
    p
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
