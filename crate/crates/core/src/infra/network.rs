use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::{LocationDensity, MobilityProfile, Point, DEFAULT_GRID};
use crate::units::{bits, GBPS, MS};
use crate::vnffg::{TypeId, UserId};

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Cloud,
    Fog,
}

/// A cloud or fog host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub tier: Tier,
    /// Processing units (vCPU).
    pub capacity: f64,
    pub usage_threshold: f64,
    /// Currency per processing unit.
    pub unit_cost: f64,
    /// Seconds per byte processed, for any VNF type without an override.
    pub proc_delay: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub proc_delay_by_type: BTreeMap<TypeId, f64>,
    pub mobility: MobilityProfile,
}

impl NodeSpec {
    pub fn proc_delay(&self, vnf: TypeId) -> f64 {
        self.proc_delay_by_type
            .get(&vnf)
            .copied()
            .unwrap_or(self.proc_delay)
    }

    /// Usable processing units, `usage_threshold * capacity`.
    pub fn usable_capacity(&self) -> f64 {
        self.usage_threshold * self.capacity
    }

    fn validate(&self, path: &str) -> Result<()> {
        if !(self.capacity > 0.0) {
            return Err(Error::schema(format!("{path}.capacity"), "must be > 0"));
        }
        if !(self.usage_threshold > 0.0 && self.usage_threshold <= 1.0) {
            return Err(Error::schema(format!("{path}.usage_threshold"), "must lie in (0, 1]"));
        }
        if !(self.unit_cost >= 0.0) {
            return Err(Error::schema(format!("{path}.unit_cost"), "must be >= 0"));
        }
        if !(self.proc_delay >= 0.0) || self.proc_delay_by_type.values().any(|d| !(*d >= 0.0)) {
            return Err(Error::schema(format!("{path}.proc_delay"), "must be >= 0"));
        }
        self.mobility.validate().map_err(|e| match e {
            Error::Schema { path: p, message } => Error::schema(format!("{path}.{p}"), message),
            other => other,
        })?;
        if self.tier == Tier::Cloud && !self.mobility.is_static() {
            return Err(Error::schema(
                format!("{path}.mobility.p_static"),
                "cloud nodes must be static",
            ));
        }
        Ok(())
    }
}

/// Endpoint classes of a logical link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkKind {
    CloudCloud,
    FogFog,
    CloudFog,
    IotCloud,
    IotFog,
}

impl LinkKind {
    pub const ALL: [LinkKind; 5] = [
        LinkKind::CloudCloud,
        LinkKind::FogFog,
        LinkKind::CloudFog,
        LinkKind::IotCloud,
        LinkKind::IotFog,
    ];

    pub fn between(a: Tier, b: Tier) -> Self {
        match (a, b) {
            (Tier::Cloud, Tier::Cloud) => LinkKind::CloudCloud,
            (Tier::Fog, Tier::Fog) => LinkKind::FogFog,
            _ => LinkKind::CloudFog,
        }
    }

    pub fn to_user(tier: Tier) -> Self {
        match tier {
            Tier::Cloud => LinkKind::IotCloud,
            Tier::Fog => LinkKind::IotFog,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Inclusive value range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub const fn point(v: f64) -> Self {
        Self { lo: v, hi: v }
    }

    /// `lo + (hi - lo) * s`.
    pub fn lerp(&self, s: f64) -> f64 {
        self.lo + (self.hi - self.lo) * s
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

impl From<[f64; 2]> for Range {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Range { lo, hi }
    }
}

impl From<Range> for [f64; 2] {
    fn from(r: Range) -> Self {
        [r.lo, r.hi]
    }
}

/// Metric ranges of one link class. Bandwidth in bits/s, latency in seconds,
/// cost in currency per byte.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkClass {
    pub kind: LinkKind,
    pub bandwidth: Range,
    pub latency: Range,
    pub unit_cost: Range,
    pub bw_threshold: f64,
}

/// Bandwidth, latency and per-byte cost of a link at one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMetrics {
    pub bandwidth: f64,
    pub latency: f64,
    pub unit_cost: f64,
}

impl LinkClass {
    pub fn validate(&self, path: &str) -> Result<()> {
        for (name, r) in [
            ("bandwidth", self.bandwidth),
            ("latency", self.latency),
            ("unit_cost", self.unit_cost),
        ] {
            if !(r.lo <= r.hi) || r.lo < 0.0 {
                return Err(Error::schema(format!("{path}.{name}"), "need 0 <= lo <= hi"));
            }
        }
        if !(self.bandwidth.lo > 0.0) {
            return Err(Error::schema(format!("{path}.bandwidth"), "must be > 0"));
        }
        if !(self.bw_threshold > 0.0 && self.bw_threshold <= 1.0) {
            return Err(Error::schema(format!("{path}.bw_threshold"), "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Metrics at normalized separation `d` in `[0, 1]`: latency and cost
    /// grow and bandwidth shrinks linearly with `d`.
    pub fn metrics_at_separation(&self, d: f64) -> LinkMetrics {
        let d = d.clamp(0.0, 1.0);
        LinkMetrics {
            bandwidth: self.bandwidth.hi - (self.bandwidth.hi - self.bandwidth.lo) * d,
            latency: self.latency.lerp(d),
            unit_cost: self.unit_cost.lerp(d),
        }
    }
}

/// Normalized separation of two locations, `|X - Y| / sqrt(2)`.
pub fn separation(x: Point, y: Point) -> f64 {
    (x.distance(y) / std::f64::consts::SQRT_2).min(1.0)
}

/// Link metrics of `class` between endpoints located at `x` and `y`.
pub fn link_metrics_at(class: &LinkClass, x: Point, y: Point) -> LinkMetrics {
    class.metrics_at_separation(separation(x, y))
}

/// Time to push `bytes` through a link: serialization plus latency.
pub fn transmission_delay(bytes: f64, bandwidth: f64, latency: f64) -> Result<f64> {
    if !(bandwidth > 0.0) {
        return Err(Error::Domain(format!("bandwidth {bandwidth} must be > 0")));
    }
    if !(bytes >= 0.0) {
        return Err(Error::Domain(format!("traffic {bytes} must be >= 0")));
    }
    Ok(bits(bytes) / bandwidth + latency)
}

/// A fixed IoT or end-user device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IotUser {
    pub id: UserId,
    pub location: Point,
}

/// Default link classes.
pub fn default_link_classes() -> Vec<LinkClass> {
    use crate::units::{per_gb, KBPS, MBPS};
    let class = |kind, bw: (f64, f64), lat_ms: (f64, f64), cost: (f64, f64)| LinkClass {
        kind,
        bandwidth: Range::new(bw.0, bw.1),
        latency: Range::new(lat_ms.0 * MS, lat_ms.1 * MS),
        unit_cost: Range::new(per_gb(cost.0), per_gb(cost.1)),
        bw_threshold: 1.0,
    };
    vec![
        class(LinkKind::CloudCloud, (10.0 * GBPS, 10.0 * GBPS), (50.0, 100.0), (0.155, 0.155)),
        class(LinkKind::FogFog, (0.1 * GBPS, 1.0 * GBPS), (10.0, 50.0), (0.25, 2.0)),
        class(LinkKind::CloudFog, (1.0 * GBPS, 10.0 * GBPS), (100.0, 255.0), (10.0, 20.0)),
        class(LinkKind::IotCloud, (10.0 * GBPS, 10.0 * GBPS), (250.0, 250.0), (20.0, 20.0)),
        class(LinkKind::IotFog, (250.0 * KBPS, 54.0 * MBPS), (7.0, 20.0), (0.05, 0.25)),
    ]
}

/// Cloud/fog nodes, link classes and IoT users.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    nodes: Vec<NodeSpec>,
    link_classes: Vec<LinkClass>,
    users: Vec<IotUser>,
    quadrature_grid: usize,
    link_jitter: f64,
    seed: u64,
}

impl NetworkModel {
    pub fn new(
        nodes: Vec<NodeSpec>,
        link_classes: Vec<LinkClass>,
        users: Vec<IotUser>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::schema("nodes", "at least one node required"));
        }
        for (i, n) in nodes.iter().enumerate() {
            let path = format!("nodes[{i}]");
            if n.id != i {
                return Err(Error::schema(format!("{path}.id"), format!("expected {i}")));
            }
            n.validate(&path)?;
        }
        let mut classes = Vec::with_capacity(LinkKind::ALL.len());
        for kind in LinkKind::ALL {
            let c = link_classes
                .iter()
                .find(|c| c.kind == kind)
                .ok_or_else(|| Error::schema("link_classes", format!("missing class {kind:?}")))?;
            c.validate(&format!("link_classes[{kind:?}]"))?;
            classes.push(*c);
        }
        for (i, u) in users.iter().enumerate() {
            if u.id != i {
                return Err(Error::schema(format!("users[{i}].id"), format!("expected {i}")));
            }
            if !u.location.in_unit_square() {
                return Err(Error::schema(format!("users[{i}].location"), "outside [0,1]^2"));
            }
        }
        Ok(Self {
            nodes,
            link_classes: classes,
            users,
            quadrature_grid: DEFAULT_GRID,
            link_jitter: 0.0,
            seed: 0,
        })
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.quadrature_grid = grid;
        self
    }

    /// Enables a static per-link offset of the normalized separation, drawn
    /// uniformly in `[-jitter, jitter]` from `seed`.
    pub fn with_link_jitter(mut self, jitter: f64, seed: u64) -> Self {
        self.link_jitter = jitter.abs();
        self.seed = seed;
        self
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NodeSpec {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn users(&self) -> &[IotUser] {
        &self.users
    }

    pub fn link_class(&self, kind: LinkKind) -> &LinkClass {
        &self.link_classes[kind.index()]
    }

    pub fn link_classes(&self) -> &[LinkClass] {
        &self.link_classes
    }

    pub fn class_between(&self, n: NodeId, m: NodeId) -> &LinkClass {
        self.link_class(LinkKind::between(self.nodes[n].tier, self.nodes[m].tier))
    }

    pub fn class_to_user(&self, n: NodeId) -> &LinkClass {
        self.link_class(LinkKind::to_user(self.nodes[n].tier))
    }

    pub fn quadrature_grid(&self) -> usize {
        self.quadrature_grid
    }

    pub fn link_jitter(&self) -> f64 {
        self.link_jitter
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn ids_of(&self, tier: Tier) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(move |n| n.tier == tier).map(|n| n.id)
    }

    pub fn density(&self, n: NodeId) -> LocationDensity {
        LocationDensity::from_profile(&self.nodes[n].mobility)
    }

    /// Same network with every node assumed to stay at its initial location.
    pub fn with_static_nodes(&self) -> Self {
        let mut out = self.clone();
        for n in &mut out.nodes {
            n.mobility = n.mobility.frozen();
        }
        out
    }

    /// Sub-network keeping only nodes of the given tiers, renumbered in order.
    pub fn restricted_to(&self, tiers: &[Tier]) -> Result<Self> {
        let mut out = self.clone();
        out.nodes = self
            .nodes
            .iter()
            .filter(|n| tiers.contains(&n.tier))
            .cloned()
            .enumerate()
            .map(|(i, mut n)| {
                n.id = i;
                n
            })
            .collect();
        if out.nodes.is_empty() {
            return Err(Error::schema("nodes", "no node left after tier restriction"));
        }
        Ok(out)
    }

    /// Every node's mobility replaced by `f(node)`.
    pub fn map_mobility(&self, f: impl Fn(&NodeSpec) -> MobilityProfile) -> Result<Self> {
        let mut out = self.clone();
        for (i, n) in out.nodes.iter_mut().enumerate() {
            n.mobility = f(n);
            n.validate(&format!("nodes[{i}]"))?;
        }
        Ok(out)
    }
}
