//! Hand-built request trees used by examples and tests.

use std::collections::BTreeMap;

use super::tree::{build_request, GraphNode, IotLink, Request, TypeId, VnfCatalog};
use crate::error::Result;

/// Component names of the earthquake early-warning and recovery application,
/// in type-id order.
pub const EARTHQUAKE_COMPONENTS: [&str; 9] = [
    "EW", // early warner and analyzer
    "HS", // historical storage
    "WA", // warning alert issuer
    "MP", // map producer
    "VD", // victim detector
    "RS", // rescue strategies
    "FR", // first responders
    "RD", // robot dispatcher
    "HR", // human-robot team
];

/// The earthquake application as a structured tree: the analyzer feeds
/// storage, alerting and the mapping chain in parallel; the rescue planner
/// picks exactly one of three responders.
pub fn earthquake_tree() -> GraphNode {
    use GraphNode as G;
    G::seq(vec![
        G::leaf(0),
        G::par(vec![
            G::leaf(1),
            G::leaf(2),
            G::seq(vec![
                G::leaf(3),
                G::leaf(4),
                G::leaf(5),
                G::sel_uniform(vec![G::leaf(6), G::leaf(7), G::leaf(8)]),
            ]),
        ]),
    ])
}

/// The earthquake request with uniform `traffic` bytes per edge. Sensors
/// (user 0) talk to the analyzer and responders' devices (user 1) to the
/// victim detector.
pub fn earthquake_request(id: usize, traffic: f64, catalog: &VnfCatalog) -> Result<Request> {
    let root = earthquake_tree();
    let traffic_in: BTreeMap<TypeId, f64> = root.leaves().into_iter().map(|t| (t, traffic)).collect();
    let iot = vec![
        IotLink { user: 0, vnf: 0, traffic },
        IotLink { user: 1, vnf: 4, traffic },
    ];
    build_request(id, root, traffic_in, iot, catalog)
}
