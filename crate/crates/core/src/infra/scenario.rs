//! Scenario documents and the built-in topology presets.

use serde::{Deserialize, Serialize};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::network::{default_link_classes, IotUser, LinkClass, NetworkModel, NodeSpec, Range, Tier};
use crate::error::{Error, Result};
use crate::mobility::{InitDist, MobilityProfile, Point};
use crate::units::ms_per_mb;

/// Built-in infrastructures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    #[serde(rename = "topology-10")]
    Topology10,
    #[serde(rename = "topology-20")]
    Topology20,
}

impl Preset {
    /// Cloud and fog node counts.
    pub fn counts(self) -> (usize, usize) {
        match self {
            Preset::Topology10 => (4, 6),
            Preset::Topology20 => (8, 12),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Topology10 => "topology-10",
            Preset::Topology20 => "topology-20",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "topology-10" => Ok(Preset::Topology10),
            "topology-20" => Ok(Preset::Topology20),
            other => Err(Error::schema("preset", format!("unknown preset `{other}`"))),
        }
    }
}

/// Ranges used to fill in unspecified node and user attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioParams {
    pub cloud_capacity: f64,
    /// Fog capacity, drawn as an integer in the inclusive range.
    pub fog_capacity: (u32, u32),
    /// Currency per vCPU.
    pub cloud_unit_cost: Range,
    pub fog_unit_cost: Range,
    pub cloud_proc_ms_per_mb: f64,
    pub fog_proc_ms_per_mb: f64,
    pub usage_threshold: f64,
    pub user_count: usize,
    pub fog_p_static: f64,
    pub fog_velocity: f64,
    pub fog_expected_pause: f64,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self {
            cloud_capacity: 8.0,
            fog_capacity: (2, 4),
            cloud_unit_cost: Range::new(2.33, 4.65),
            fog_unit_cost: Range::new(4.65, 5.82),
            cloud_proc_ms_per_mb: 0.25,
            fog_proc_ms_per_mb: 25.0,
            usage_threshold: 1.0,
            user_count: 10,
            fog_p_static: 0.5,
            fog_velocity: 0.01,
            fog_expected_pause: 20.0,
        }
    }
}

/// One node entry of a scenario document. Missing attributes are drawn from
/// the scenario ranges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub tier: Tier,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub usage_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit_cost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub proc_ms_per_mb: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location: Option<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mobility: Option<MobilityProfile>,
}

/// Scenario document.
///
/// ```json
/// { "preset": "topology-10", "seed": 3, "quadrature_grid": 24,
///   "params": { "fog_p_static": 0.25 },
///   "users": [[0.1, 0.2], [0.8, 0.5]] }
/// ```
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature_grid: Option<usize>,
    #[serde(default)]
    pub link_jitter: f64,
    #[serde(default)]
    pub params: ScenarioParams,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub nodes: Vec<NodeDoc>,
    /// Per-kind overrides of the default link classes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub link_classes: Vec<LinkClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub users: Option<Vec<Point>>,
}

impl ScenarioDoc {
    pub fn preset(preset: Preset, seed: u64) -> Self {
        Self {
            preset: Some(preset),
            seed,
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::schema(path, e.into_inner().to_string())
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

/// Parses and builds a scenario document.
pub fn load_scenario(text: &str) -> Result<NetworkModel> {
    build_scenario(&ScenarioDoc::from_json(text)?)
}

/// Network of a preset with default ranges.
pub fn preset_network(preset: Preset, seed: u64) -> Result<NetworkModel> {
    build_scenario(&ScenarioDoc::preset(preset, seed))
}

fn check_params(p: &ScenarioParams) -> Result<()> {
    if !(p.cloud_capacity > 0.0) {
        return Err(Error::schema("params.cloud_capacity", "must be > 0"));
    }
    if p.fog_capacity.0 == 0 || p.fog_capacity.0 > p.fog_capacity.1 {
        return Err(Error::schema("params.fog_capacity", "need 0 < lo <= hi"));
    }
    for (name, r) in [("cloud_unit_cost", p.cloud_unit_cost), ("fog_unit_cost", p.fog_unit_cost)] {
        if !(r.lo >= 0.0 && r.lo <= r.hi) {
            return Err(Error::schema(format!("params.{name}"), "need 0 <= lo <= hi"));
        }
    }
    Ok(())
}

/// Validates a scenario document and builds its network. Node and user
/// attributes left out of the document are drawn with the document seed.
pub fn build_scenario(doc: &ScenarioDoc) -> Result<NetworkModel> {
    let p = &doc.params;
    check_params(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(doc.seed);

    let entries: Vec<NodeDoc> = if doc.nodes.is_empty() {
        let (clouds, fogs) = doc
            .preset
            .ok_or_else(|| Error::schema("nodes", "either `preset` or `nodes` is required"))?
            .counts();
        let blank = |tier| NodeDoc {
            tier,
            capacity: None,
            usage_threshold: None,
            unit_cost: None,
            proc_ms_per_mb: None,
            location: None,
            mobility: None,
        };
        (0..clouds)
            .map(|_| blank(Tier::Cloud))
            .chain((0..fogs).map(|_| blank(Tier::Fog)))
            .collect()
    } else {
        if let Some(preset) = doc.preset {
            check_against_preset(preset, p, &doc.nodes)?;
        }
        doc.nodes.clone()
    };

    let mut nodes = Vec::with_capacity(entries.len());
    for (id, e) in entries.iter().enumerate() {
        let cloud = e.tier == Tier::Cloud;
        let capacity = match e.capacity {
            Some(c) => c,
            None if cloud => p.cloud_capacity,
            None => rng.random_range(p.fog_capacity.0..=p.fog_capacity.1) as f64,
        };
        let cost_range = if cloud { p.cloud_unit_cost } else { p.fog_unit_cost };
        let drawn_cost = cost_range.lerp(rng.random::<f64>());
        let drawn_at = Point::new(rng.random(), rng.random());
        let location = e.location.unwrap_or(drawn_at);
        let mobility = match e.mobility {
            Some(m) => m,
            None if cloud => MobilityProfile::fixed(location),
            None => MobilityProfile {
                p_static: p.fog_p_static,
                velocity: p.fog_velocity,
                expected_pause: p.fog_expected_pause,
                init: InitDist::Point(location),
            },
        };
        let proc = e.proc_ms_per_mb.unwrap_or(if cloud {
            p.cloud_proc_ms_per_mb
        } else {
            p.fog_proc_ms_per_mb
        });
        nodes.push(NodeSpec {
            id,
            tier: e.tier,
            capacity,
            usage_threshold: e.usage_threshold.unwrap_or(p.usage_threshold),
            unit_cost: e.unit_cost.unwrap_or(drawn_cost),
            proc_delay: ms_per_mb(proc),
            proc_delay_by_type: Default::default(),
            mobility,
        });
    }

    let users: Vec<IotUser> = match &doc.users {
        Some(points) => points
            .iter()
            .enumerate()
            .map(|(id, &location)| IotUser { id, location })
            .collect(),
        None => (0..p.user_count)
            .map(|id| IotUser {
                id,
                location: Point::new(rng.random(), rng.random()),
            })
            .collect(),
    };

    let mut classes = default_link_classes();
    for (i, c) in doc.link_classes.iter().enumerate() {
        c.validate(&format!("link_classes[{i}]"))?;
        let slot = classes.iter_mut().find(|d| d.kind == c.kind).expect("all kinds present");
        *slot = *c;
    }

    let mut net = NetworkModel::new(nodes, classes, users)?;
    if let Some(g) = doc.quadrature_grid {
        if g == 0 {
            return Err(Error::schema("quadrature_grid", "must be >= 1"));
        }
        net = net.with_grid(g);
    }
    if !(doc.link_jitter >= 0.0 && doc.link_jitter <= 1.0) {
        return Err(Error::schema("link_jitter", "must lie in [0, 1]"));
    }
    Ok(net.with_link_jitter(doc.link_jitter, doc.seed))
}

fn check_against_preset(preset: Preset, p: &ScenarioParams, nodes: &[NodeDoc]) -> Result<()> {
    let (clouds, fogs) = preset.counts();
    let count = |t| nodes.iter().filter(|n| n.tier == t).count();
    if count(Tier::Cloud) != clouds || count(Tier::Fog) != fogs {
        return Err(Error::schema(
            "nodes",
            format!("{} expects {clouds} cloud and {fogs} fog nodes", preset.name()),
        ));
    }
    for (i, n) in nodes.iter().enumerate() {
        let Some(c) = n.capacity else { continue };
        let ok = match n.tier {
            Tier::Cloud => c == p.cloud_capacity,
            Tier::Fog => c >= p.fog_capacity.0 as f64 && c <= p.fog_capacity.1 as f64,
        };
        if !ok {
            return Err(Error::schema(
                format!("nodes[{i}].capacity"),
                format!("{c} vCPU is outside the {} range", preset.name()),
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::infra::LinkKind;
    use crate::units::MB;

    #[test]
    fn presets_have_expected_tiers() {
        for (preset, c, f) in [(Preset::Topology10, 4, 6), (Preset::Topology20, 8, 12)] {
            let net = preset_network(preset, 1).unwrap();
            assert_eq!(net.ids_of(Tier::Cloud).count(), c);
            assert_eq!(net.ids_of(Tier::Fog).count(), f);
            assert_eq!(net.users().len(), 10);
            for n in net.nodes() {
                match n.tier {
                    Tier::Cloud => {
                        assert_eq!(n.capacity, 8.0);
                        assert!(n.mobility.is_static());
                        assert!((n.proc_delay * MB - 0.25e-3).abs() < 1e-15);
                    }
                    Tier::Fog => {
                        assert!([2.0, 3.0, 4.0].contains(&n.capacity));
                        assert!((4.65..=5.82).contains(&n.unit_cost));
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = preset_network(Preset::Topology10, 5).unwrap();
        assert_eq!(a, preset_network(Preset::Topology10, 5).unwrap());
        assert_ne!(a, preset_network(Preset::Topology10, 6).unwrap());
    }

    #[test]
    fn fog_capacity_outside_preset_range() {
        let mut nodes = vec![r#"{"tier":"cloud"}"#; 4];
        nodes.extend(vec![r#"{"tier":"fog"}"#; 5]);
        nodes.push(r#"{"tier":"fog","capacity":6}"#);
        let text = format!(r#"{{"preset":"topology-10","nodes":[{}]}}"#, nodes.join(","));
        let err = load_scenario(&text).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "nodes[9].capacity"), "{err}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = load_scenario(r#"{"preset":"topology-10","params":{"fog_velocity":"fast"}}"#)
            .unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "params.fog_velocity"), "{err}");
        let err = load_scenario(r#"{"seed":1}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "nodes"));
        let err = load_scenario(r#"{"preset":"topology-30"}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "preset"), "{err}");
    }

    #[test]
    fn explicit_document() {
        let text = r#"{
            "seed": 2,
            "quadrature_grid": 8,
            "nodes": [
                {"tier": "cloud", "location": [0.5, 0.5], "unit_cost": 3.0},
                {"tier": "fog", "capacity": 2, "location": [0.1, 0.1],
                 "mobility": {"p_static": 1.0, "velocity": 0.0, "expected_pause": 0.0,
                              "init": {"point": [0.1, 0.1]}}}
            ],
            "link_classes": [{"kind": "fog-fog", "bandwidth": [1e8, 1e8],
                              "latency": [0.01, 0.01], "unit_cost": [0.0, 0.0],
                              "bw_threshold": 1.0}],
            "users": [[0.0, 0.0]]
        }"#;
        let net = load_scenario(text).unwrap();
        assert_eq!(net.len(), 2);
        assert_eq!(net.node(0).unit_cost, 3.0);
        assert_eq!(net.quadrature_grid(), 8);
        assert_eq!(net.link_class(LinkKind::FogFog).latency.hi, 0.01);
        assert_eq!(net.users()[0].location, Point::new(0.0, 0.0));
        let doc = ScenarioDoc::from_json(text).unwrap();
        assert_eq!(ScenarioDoc::from_json(&doc.to_json()).unwrap(), doc);
    }
}
