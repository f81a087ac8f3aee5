//! Cloud/fog nodes, location-dependent logical links, IoT users and the
//! cache of expected link metrics.

mod cache;
mod network;
mod scenario;

pub use cache::{build_cache, colocated_link, ExpectedLinkCache, LinkExpectation};
pub use network::{
    default_link_classes, link_metrics_at, separation, transmission_delay, IotUser, LinkClass,
    LinkKind, LinkMetrics, NetworkModel, NodeId, NodeSpec, Range, Tier,
};
pub use scenario::{
    build_scenario, load_scenario, preset_network, NodeDoc, Preset, ScenarioDoc, ScenarioParams,
};
