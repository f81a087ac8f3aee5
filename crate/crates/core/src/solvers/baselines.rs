use std::time::Instant;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::moves::{instance_load, node_usage, request_load};
use super::tabu::{penalty_scale, tabu_search, SolveResult, TabuParams};
use crate::error::Result;
use crate::evaluator::{Placement, Problem};
use crate::infra::{NodeId, Tier};
use crate::units::bits;
use crate::vnffg::TypeId;

/// Starting point of the tabu search: one instance per required type, IoT
/// facing types on random fog nodes and the rest on random cloud nodes, with
/// every request assigned to that instance.
pub fn initial_placement(problem: &Problem, seed: u64) -> Placement {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1417_1a1b);
    let net = problem.network();
    let mut p = Placement::empty(problem.catalog(), problem.requests().len());
    let mut used = vec![0.0; net.len()];
    let all: Vec<NodeId> = (0..net.len()).collect();

    for &t in problem.required_types() {
        let need = problem.catalog()[t].resource_req;
        let iot = problem.requests().iter().any(|r| r.communicates_with_iot(t));
        let preferred = if iot { Tier::Fog } else { Tier::Cloud };
        let fits = |n: &NodeId| used[*n] + need <= net.node(*n).usable_capacity();
        let tier: Vec<NodeId> = net.ids_of(preferred).filter(fits).collect();
        let any: Vec<NodeId> = all.iter().copied().filter(fits).collect();
        let n = *tier
            .choose(&mut rng)
            .or_else(|| any.choose(&mut rng))
            .or_else(|| all.choose(&mut rng))
            .expect("nonempty network");
        used[n] += need;
        p.deploy(t, 0, n);
        for (r, req) in problem.requests().iter().enumerate() {
            if req.required_types().contains(&t) {
                p.assign(r, t, 0);
            }
        }
    }
    p
}

/// First-fit baseline. Requests are served in order; each VNF reuses a
/// deployed instance with spare capacity or else opens one on the lowest-id
/// node that has room for it and whose links from the predecessors can carry
/// the traffic.
pub fn greedy_place(problem: &Problem) -> Placement {
    let net = problem.network();
    let nn = net.len();
    let mut p = Placement::empty(problem.catalog(), problem.requests().len());
    let mut link = vec![0.0; nn * nn];

    for (r, req) in problem.requests().iter().enumerate() {
        for &t in req.vnfs() {
            let ty = &problem.catalog()[t];
            let load = request_load(problem, r, t);
            let limit = ty.util_threshold * ty.capacity;

            let reuse = (0..p.deployed[t].len()).find(|&i| {
                p.host(t, i).is_some() && instance_load(problem, &p, t, i) + load <= limit
            });
            let instance = match reuse {
                Some(i) => i,
                None => {
                    let used = node_usage(problem, &p);
                    let traffic = req.load_weight(t) * bits(req.traffic_in(t));
                    let preds: Vec<NodeId> = req
                        .immediate_predecessors(t)
                        .map(|s| s.iter().filter_map(|&f| p.assignment(r, f).map(|a| a.node)).collect())
                        .unwrap_or_default();
                    let room = |n: NodeId| used[n] + ty.resource_req <= net.node(n).usable_capacity();
                    let links_ok = |n: NodeId| {
                        preds.iter().all(|&m| {
                            m == n
                                || link[m * nn + n] + traffic
                                    <= net.class_between(m, n).bw_threshold
                                        * problem.cache().between(m, n).bandwidth
                        })
                    };
                    match p.deployed[t].iter().position(|h| h.is_none()) {
                        Some(free) => {
                            let n = (0..nn)
                                .find(|&n| room(n) && links_ok(n))
                                .or_else(|| (0..nn).find(|&n| room(n)))
                                .unwrap_or_else(|| most_free(problem, &used));
                            p.deploy(t, free, n);
                            free
                        }
                        // No slot left: the least loaded instance absorbs it.
                        None => least_loaded(problem, &p, t),
                    }
                }
            };
            p.assign(r, t, instance);
            let to = p.host(t, instance).expect("deployed");
            if let Ok(preds) = req.immediate_predecessors(t) {
                for &f in preds {
                    if let Some(a) = p.assignment(r, f) {
                        if a.node != to {
                            link[a.node * nn + to] += req.load_weight(t) * bits(req.traffic_in(t));
                        }
                    }
                }
            }
        }
    }
    p
}

fn most_free(problem: &Problem, used: &[f64]) -> NodeId {
    let net = problem.network();
    let mut best = 0;
    for n in 1..net.len() {
        let slack = |m: NodeId| net.node(m).usable_capacity() - used[m];
        if slack(n) > slack(best) {
            best = n;
        }
    }
    best
}

fn least_loaded(problem: &Problem, p: &Placement, t: TypeId) -> usize {
    let mut best = None;
    for i in 0..p.deployed[t].len() {
        if p.host(t, i).is_none() {
            continue;
        }
        let l = instance_load(problem, p, t, i);
        if best.is_none_or(|(_, b)| l < b) {
            best = Some((i, l));
        }
    }
    best.map(|(i, _)| i).unwrap_or(0)
}

/// Tabu search that believes every node stays at its initial location. The
/// returned fitness is that of the found placement under the true mobility
/// model.
pub fn psf_place(problem: &Problem, params: &TabuParams) -> Result<SolveResult> {
    let start = Instant::now();
    let scale = match params.penalty_scale {
        Some(s) => s,
        None => penalty_scale(problem, &params.weights, params.seed)?,
    };
    let frozen = problem.with_network(problem.network().with_static_nodes())?;
    let mut res = tabu_search(
        &frozen,
        &TabuParams {
            penalty_scale: Some(scale),
            ..*params
        },
    )?;
    res.fitness = problem.fitness(&res.placement, &params.weights, scale)?;
    res.evaluations += 1;
    res.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(res)
}
