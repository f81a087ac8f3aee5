//! Synthetic fork-join workloads.
//!
//! Each request is a loop-free tree of alternating sequence and fork
//! (parallel or selection) levels. The shape is fixed in two steps: an equal
//! out-degree for every middle node derived from the VNF count and height,
//! then a random edge-ratio stretch of the fork out-degrees followed by a
//! rebalance that restores the requested VNF count.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::tree::{build_request, GraphNode, IotLink, Request, TypeId, VnfCatalog, VnfType};
use crate::error::{Error, Result};
use crate::units::{GB, KB};

/// Ranges the generator samples from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorkloadParams {
    /// Inclusive range of VNFs per request.
    pub vnf_count: (usize, usize),
    pub heights: Vec<usize>,
    pub edge_ratios: Vec<f64>,
    /// Probability that a fork is a selection rather than a parallel block.
    pub sel_ratios: Vec<f64>,
    /// Inclusive range of traffic per VNF edge, bytes.
    pub traffic: (f64, f64),
    /// Number of VNF types in the catalog.
    pub type_count: usize,
    /// vCPU per instance, inclusive integer range.
    pub resource_req: (u32, u32),
    /// Instance traffic capacity, bytes.
    pub type_capacity: (f64, f64),
    pub license_cost: f64,
    pub util_threshold: f64,
    pub instances_per_type: usize,
    /// Users available in the scenario; ids are `0..user_count`.
    pub user_count: usize,
    /// Users a single request talks to, inclusive range.
    pub users_per_request: (usize, usize),
    /// VNFs per request that exchange traffic with an IoT user, inclusive range.
    pub iot_vnfs: (usize, usize),
}

impl Default for WorkloadParams {
    fn default() -> Self {
        Self {
            vnf_count: (3, 10),
            heights: vec![2, 4, 6, 8],
            edge_ratios: vec![1.1, 1.3, 1.5, 1.7, 1.9],
            sel_ratios: vec![0.0, 0.2, 0.4, 0.6, 0.8, 1.0],
            traffic: (100.0, 80.0 * KB),
            type_count: 10,
            resource_req: (1, 4),
            type_capacity: (1.0 * GB, 2.0 * GB),
            license_cost: 100.0,
            util_threshold: 1.0,
            instances_per_type: 3,
            user_count: 10,
            users_per_request: (1, 3),
            iot_vnfs: (1, 2),
        }
    }
}

/// A catalog together with the requests drawn against it.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub catalog: VnfCatalog,
    pub requests: Vec<Request>,
}

/// Draws a catalog of `params.type_count` VNF types.
pub fn generate_catalog(params: &WorkloadParams, rng: &mut impl Rng) -> Result<VnfCatalog> {
    let (lo, hi) = params.resource_req;
    if lo == 0 || lo > hi {
        return Err(Error::schema("workload.resource_req", "need 1 <= lo <= hi"));
    }
    let types = (0..params.type_count)
        .map(|id| VnfType {
            id,
            resource_req: rng.random_range(lo..=hi) as f64,
            capacity: uniform(rng, params.type_capacity),
            license_cost: params.license_cost,
            util_threshold: params.util_threshold,
            instance_count: params.instances_per_type,
        })
        .collect();
    VnfCatalog::new(types)
}

/// Generates `count` fork-join requests plus their catalog, fully determined
/// by `seed`.
pub fn generate_workload(count: usize, seed: u64, params: &WorkloadParams) -> Result<Workload> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let catalog = generate_catalog(params, &mut rng)?;
    let shapes = feasible_shapes(params)?;
    let mut requests = Vec::with_capacity(count);
    for id in 0..count {
        let &(leaves, height) = shapes.choose(&mut rng).expect("nonempty");
        let root = fork_join_tree(leaves, height, params, &mut rng)?;
        let (traffic, iot) = annotate(&root, params, &mut rng);
        requests.push(build_request(id, root, traffic, iot, &catalog)?);
    }
    Ok(Workload { catalog, requests })
}

/// All (VNF count, height) pairs the ranges admit. A tree whose middle nodes
/// all have at least two children needs at least `height + 1` leaves.
fn feasible_shapes(params: &WorkloadParams) -> Result<Vec<(usize, usize)>> {
    let (lo, hi) = params.vnf_count;
    let hi = hi.min(params.type_count);
    if params.heights.iter().any(|&h| h == 0) {
        return Err(Error::InfeasibleShape("height must be >= 1".into()));
    }
    let mut shapes = Vec::new();
    for leaves in lo.max(2)..=hi {
        // Sample the VNF count uniformly first, then a height compatible with it.
        let heights: Vec<usize> = params
            .heights
            .iter()
            .copied()
            .filter(|h| h + 1 <= leaves)
            .collect();
        let reps = lcm_weight(params.heights.len());
        for &h in &heights {
            for _ in 0..reps / heights.len() {
                shapes.push((leaves, h));
            }
        }
    }
    if shapes.is_empty() {
        return Err(Error::InfeasibleShape(format!(
            "no tree with {lo}..={hi} VNFs (catalog has {} types) reaches any height in {:?}",
            params.type_count, params.heights
        )));
    }
    Ok(shapes)
}

// Equal weight per VNF count regardless of how many heights it admits.
fn lcm_weight(max_heights: usize) -> usize {
    (1..=max_heights.max(1)).fold(1, |acc, k| acc / gcd(acc, k) * k)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds one fork-join tree with exactly `leaves` leaves and height `height`.
pub fn fork_join_tree(
    leaves: usize,
    height: usize,
    params: &WorkloadParams,
    rng: &mut impl Rng,
) -> Result<GraphNode> {
    if height == 0 || leaves < height + 1 {
        return Err(Error::InfeasibleShape(format!(
            "{leaves} VNFs cannot form a tree of height {height}"
        )));
    }
    if leaves > params.type_count {
        return Err(Error::InfeasibleShape(format!(
            "{leaves} VNFs need distinct types but the catalog has {}",
            params.type_count
        )));
    }
    // Spine of middle nodes at levels 0..height; even levels are sequences,
    // odd levels are forks. Every spine node but the deepest hosts the next
    // spine node as one of its children; all other children are leaves.
    let is_fork = |level: usize| level % 2 == 1;
    let leaf_total = |deg: &[usize]| -> usize {
        deg[..height - 1].iter().map(|d| d - 1).sum::<usize>() + deg[height - 1]
    };

    // Step 1: equal out-degree.
    let base = ((leaves + height - 1) / height).max(2);
    let mut degree = vec![base; height];

    // Step 2: stretch fork out-degrees by the edge ratio, then rebalance.
    let ratio = *params
        .edge_ratios
        .choose(rng)
        .ok_or_else(|| Error::InfeasibleShape("empty edge ratio list".into()))?;
    for (level, d) in degree.iter_mut().enumerate() {
        if is_fork(level) {
            *d = ((*d as f64 * ratio).floor() as usize).max(2);
        }
    }
    loop {
        let total = leaf_total(&degree);
        if total == leaves {
            break;
        }
        if total > leaves {
            let shrinkable: Vec<usize> = (0..height).filter(|&l| degree[l] > 2).collect();
            let &level = shrinkable.choose(rng).expect("minimum shape fits");
            degree[level] -= 1;
        } else {
            let level = rng.random_range(0..height);
            degree[level] += 1;
        }
    }

    let sel_ratio = *params
        .sel_ratios
        .choose(rng)
        .ok_or_else(|| Error::InfeasibleShape("empty selection ratio list".into()))?;
    let fork_kinds: Vec<bool> = (0..height).map(|_| rng.random_bool(sel_ratio)).collect();
    let spine_slots: Vec<usize> = (0..height).map(|l| rng.random_range(0..degree[l])).collect();

    let mut types: Vec<TypeId> = (0..params.type_count).collect();
    types.shuffle(rng);
    let mut types = types.into_iter().take(leaves);

    let mut child: Option<GraphNode> = None;
    for level in (0..height).rev() {
        let mut children = Vec::with_capacity(degree[level]);
        for slot in 0..degree[level] {
            if slot == spine_slots[level] && child.is_some() {
                children.push(child.take().expect("checked"));
            } else {
                children.push(GraphNode::leaf(types.next().expect("leaf budget")));
            }
        }
        let node = if !is_fork(level) {
            GraphNode::seq(children)
        } else if fork_kinds[level] {
            GraphNode::sel_uniform(children)
        } else {
            GraphNode::par(children)
        };
        child = Some(node);
    }
    Ok(child.expect("height >= 1"))
}

fn annotate(
    root: &GraphNode,
    params: &WorkloadParams,
    rng: &mut impl Rng,
) -> (BTreeMap<TypeId, f64>, Vec<IotLink>) {
    let leaves = root.leaves();
    let traffic = leaves
        .iter()
        .map(|&t| (t, uniform(rng, params.traffic).round()))
        .collect();

    let mut iot = Vec::new();
    if params.user_count > 0 {
        let (ulo, uhi) = params.users_per_request;
        let n_users = rng.random_range(ulo.min(uhi)..=uhi).clamp(1, params.user_count);
        let all: Vec<usize> = (0..params.user_count).collect();
        let users: Vec<usize> = all.choose_multiple(rng, n_users).copied().collect();
        let (vlo, vhi) = params.iot_vnfs;
        let n_vnfs = rng.random_range(vlo.min(vhi)..=vhi).min(leaves.len());
        let chosen: BTreeSet<TypeId> = leaves.choose_multiple(rng, n_vnfs).copied().collect();
        for vnf in chosen {
            let user = *users.choose(rng).expect("at least one user");
            iot.push(IotLink {
                user,
                vnf,
                traffic: uniform(rng, params.traffic).round().max(1.0),
            });
        }
    }
    (traffic, iot)
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..=hi)
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifty_requests_in_range() {
        let w = generate_workload(50, 7, &WorkloadParams::default()).unwrap();
        assert_eq!(w.requests.len(), 50);
        for r in &w.requests {
            let n = r.vnfs().len();
            assert!((3..=10).contains(&n), "{n} leaves");
            assert!([2, 4, 6, 8].contains(&r.root().height()));
            assert_eq!(n, r.required_types().len());
            for &t in r.vnfs() {
                let a = r.traffic_in(t);
                assert!((100.0..=80_000.0).contains(&a));
            }
        }
    }

    #[test]
    fn empty_and_deterministic() {
        let p = WorkloadParams::default();
        assert!(generate_workload(0, 1, &p).unwrap().requests.is_empty());
        assert_eq!(generate_workload(20, 3, &p).unwrap(), generate_workload(20, 3, &p).unwrap());
        assert_ne!(generate_workload(20, 3, &p).unwrap(), generate_workload(20, 4, &p).unwrap());
    }

    #[test]
    fn infeasible_shape_reported() {
        let p = WorkloadParams {
            vnf_count: (3, 3),
            heights: vec![8],
            ..Default::default()
        };
        assert!(matches!(generate_workload(1, 0, &p), Err(Error::InfeasibleShape(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(fork_join_tree(4, 4, &WorkloadParams::default(), &mut rng).is_err());
    }

    #[test]
    fn every_feasible_shape_is_exact() {
        let p = WorkloadParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for leaves in 3..=10 {
            for &h in &[2, 4, 6, 8] {
                if h + 1 > leaves {
                    continue;
                }
                for _ in 0..20 {
                    let t = fork_join_tree(leaves, h, &p, &mut rng).unwrap();
                    assert_eq!(t.leaves().len(), leaves);
                    assert_eq!(t.height(), h);
                    assert!(!contains_loop(&t));
                }
            }
        }
    }

    fn contains_loop(n: &GraphNode) -> bool {
        matches!(n, GraphNode::Loop { .. }) || n.children().iter().any(contains_loop)
    }

    #[test]
    fn selection_ratio_extremes() {
        let all_sel = WorkloadParams {
            sel_ratios: vec![1.0],
            ..Default::default()
        };
        let w = generate_workload(10, 2, &all_sel).unwrap();
        assert!(w.requests.iter().all(|r| !has_par(r.root())));
        let no_sel = WorkloadParams {
            sel_ratios: vec![0.0],
            ..Default::default()
        };
        let w = generate_workload(10, 2, &no_sel).unwrap();
        assert!(w.requests.iter().all(|r| !has_sel(r.root())));
    }

    fn has_par(n: &GraphNode) -> bool {
        matches!(n, GraphNode::Par { .. }) || n.children().iter().any(has_par)
    }

    fn has_sel(n: &GraphNode) -> bool {
        match n {
            GraphNode::Sel { sel_probs, .. } => {
                let h = 1.0 / sel_probs.len() as f64;
                assert!(sel_probs.iter().all(|p| *p == h));
                true
            }
            _ => n.children().iter().any(has_sel),
        }
    }
}
