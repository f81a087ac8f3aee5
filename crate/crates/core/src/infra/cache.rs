use std::collections::HashMap;
use std::ops::{Add, Mul};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::network::{LinkClass, LinkKind, NetworkModel, NodeId};
use crate::error::Result;
use crate::mobility::{Basis, Component, DiscreteMeasure, Point};
use crate::units::bits;
use crate::vnffg::UserId;

/// Expected per-unit metrics of one logical link.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LinkExpectation {
    /// E[1/BW], seconds per bit.
    pub inv_bandwidth: f64,
    /// E[Lat], seconds.
    pub latency: f64,
    /// E[unit cost], currency per byte.
    pub unit_cost: f64,
    /// E[BW], bits per second.
    pub bandwidth: f64,
}

impl LinkExpectation {
    /// Expected time to move `bytes` across the link.
    pub fn delay(&self, bytes: f64) -> f64 {
        bits(bytes) * self.inv_bandwidth + self.latency
    }

    /// Expected cost of moving `bytes` across the link.
    pub fn cost(&self, bytes: f64) -> f64 {
        bytes * self.unit_cost
    }

    fn sample(class: &LinkClass, x: Point, y: Point, offset: f64) -> Self {
        let m = class.metrics_at_separation(super::network::separation(x, y) + offset);
        Self {
            inv_bandwidth: 1.0 / m.bandwidth,
            latency: m.latency,
            unit_cost: m.unit_cost,
            bandwidth: m.bandwidth,
        }
    }
}

impl Add for LinkExpectation {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            inv_bandwidth: self.inv_bandwidth + o.inv_bandwidth,
            latency: self.latency + o.latency,
            unit_cost: self.unit_cost + o.unit_cost,
            bandwidth: self.bandwidth + o.bandwidth,
        }
    }
}

impl Mul<f64> for LinkExpectation {
    type Output = Self;

    fn mul(self, w: f64) -> Self {
        Self {
            inv_bandwidth: self.inv_bandwidth * w,
            latency: self.latency * w,
            unit_cost: self.unit_cost * w,
            bandwidth: self.bandwidth * w,
        }
    }
}

/// Expected link metrics for every node pair and node-user pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedLinkCache {
    nodes: usize,
    users: usize,
    node_node: Vec<LinkExpectation>,
    node_user: Vec<LinkExpectation>,
}

impl ExpectedLinkCache {
    pub fn between(&self, n: NodeId, m: NodeId) -> &LinkExpectation {
        &self.node_node[n * self.nodes + m]
    }

    pub fn to_user(&self, n: NodeId, u: UserId) -> &LinkExpectation {
        &self.node_user[n * self.users + u]
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn user_count(&self) -> usize {
        self.users
    }
}

/// Intra-node link: no latency, no cost, cloud-class bandwidth.
pub fn colocated_link(network: &NetworkModel) -> LinkExpectation {
    let bw = network.link_class(LinkKind::CloudCloud).bandwidth.hi;
    LinkExpectation {
        inv_bandwidth: 1.0 / bw,
        latency: 0.0,
        unit_cost: 0.0,
        bandwidth: bw,
    }
}

fn pair_offset(network: &NetworkModel, salt: u64, a: usize, b: usize) -> f64 {
    let j = network.link_jitter();
    if j == 0.0 {
        return 0.0;
    }
    let (lo, hi) = (a.min(b) as u64, a.max(b) as u64);
    let key = network.seed() ^ salt.rotate_left(48) ^ (lo << 24) ^ hi.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    ChaCha8Rng::seed_from_u64(key).random_range(-j..=j)
}

type BasisKey = (LinkKind, Basis, Basis);

struct Expectations<'a> {
    network: &'a NetworkModel,
    bases: HashMap<Basis, DiscreteMeasure>,
    basis_pairs: HashMap<BasisKey, LinkExpectation>,
}

impl Expectations<'_> {
    fn component_pair(
        &self,
        class: &LinkClass,
        a: Component,
        b: Component,
        offset: f64,
    ) -> LinkExpectation {
        let g = |x: Point, y: Point| LinkExpectation::sample(class, x, y, offset);
        match (a, b) {
            (Component::Atom(p), Component::Atom(q)) => g(p, q),
            (Component::Atom(p), Component::Continuous(basis))
            | (Component::Continuous(basis), Component::Atom(p)) => {
                self.bases[&basis].expect(|q| g(p, q))
            }
            (Component::Continuous(ba), Component::Continuous(bb)) => {
                if offset == 0.0 {
                    if let Some(e) = self.basis_pairs.get(&(class.kind, ba, bb)) {
                        return *e;
                    }
                }
                self.bases[&ba].expect_pair(&self.bases[&bb], g)
            }
        }
    }

    fn mixture(
        &self,
        class: &LinkClass,
        a: &[(Component, f64)],
        b: &[(Component, f64)],
        offset: f64,
    ) -> LinkExpectation {
        let mut acc = LinkExpectation::default();
        for &(ca, wa) in a {
            for &(cb, wb) in b {
                acc = acc + self.component_pair(class, ca, cb, offset) * (wa * wb);
            }
        }
        acc
    }
}

/// Computes E[1/BW], E[Lat], E[cost] and E[BW] for every ordered node pair
/// and node-user pair, integrating the link metrics over the stationary
/// location densities of the endpoints.
pub fn build_cache(network: &NetworkModel) -> Result<ExpectedLinkCache> {
    let n = network.len();
    let u = network.users().len();
    let grid = network.quadrature_grid();
    let components: Vec<Vec<(Component, f64)>> =
        (0..n).map(|i| network.density(i).components()).collect();

    let mut needed_bases = Vec::new();
    for comps in &components {
        for (c, _) in comps {
            if let Component::Continuous(b) = c {
                if !needed_bases.contains(b) {
                    needed_bases.push(*b);
                }
            }
        }
    }
    let mut bases = HashMap::new();
    for b in &needed_bases {
        bases.insert(*b, DiscreteMeasure::basis(*b, grid)?);
    }

    // Continuous-continuous blocks depend only on the link class and the two
    // bases, so they are integrated once.
    let mut keys = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            let kind = network.class_between(a, b).kind;
            for (ca, _) in &components[a] {
                for (cb, _) in &components[b] {
                    if let (Component::Continuous(ba), Component::Continuous(bb)) = (ca, cb) {
                        let key = (kind, *ba, *bb);
                        if !keys.contains(&key) {
                            keys.push(key);
                        }
                    }
                }
            }
        }
    }
    let mut ctx = Expectations {
        network,
        bases,
        basis_pairs: HashMap::new(),
    };
    if network.link_jitter() == 0.0 {
        let computed: Vec<(BasisKey, LinkExpectation)> = keys
            .par_iter()
            .map(|&(kind, ba, bb)| {
                let class = network.link_class(kind);
                let e = ctx.bases[&ba].expect_pair(&ctx.bases[&bb], |x, y| {
                    LinkExpectation::sample(class, x, y, 0.0)
                });
                ((kind, ba, bb), e)
            })
            .collect();
        ctx.basis_pairs.extend(computed);
    }

    let colocated = colocated_link(network);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
        .collect();
    let pair_values: Vec<LinkExpectation> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let class = ctx.network.class_between(a, b);
            let offset = pair_offset(ctx.network, 1, a, b);
            ctx.mixture(class, &components[a], &components[b], offset)
        })
        .collect();
    let mut node_node = vec![colocated; n * n];
    for (&(a, b), e) in pairs.iter().zip(pair_values) {
        node_node[a * n + b] = e;
        node_node[b * n + a] = e;
    }

    let node_user: Vec<LinkExpectation> = (0..n * u)
        .into_par_iter()
        .map(|idx| {
            let (a, user) = (idx / u, idx % u);
            let class = ctx.network.class_to_user(a);
            let offset = pair_offset(ctx.network, 2, a, user);
            let at = [(Component::Atom(ctx.network.users()[user].location), 1.0)];
            ctx.mixture(class, &components[a], &at, offset)
        })
        .collect();

    Ok(ExpectedLinkCache {
        nodes: n,
        users: u,
        node_node,
        node_user,
    })
}
