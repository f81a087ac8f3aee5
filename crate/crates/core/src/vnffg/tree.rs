use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TypeId = usize;
pub type UserId = usize;

const PROB_SUM_TOL: f64 = 1e-9;

/// A VNF type from the catalog shared by all requests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VnfType {
    pub id: TypeId,
    /// Processing units (vCPU) one instance occupies on its host.
    pub resource_req: f64,
    /// Traffic (bytes) one instance can absorb.
    pub capacity: f64,
    pub license_cost: f64,
    pub util_threshold: f64,
    pub instance_count: usize,
}

impl VnfType {
    pub fn validate(&self) -> Result<()> {
        let path = format!("types[{}]", self.id);
        if !(self.resource_req > 0.0) {
            return Err(Error::schema(path + ".resource_req", "must be > 0"));
        }
        if !(self.capacity > 0.0) {
            return Err(Error::schema(path + ".capacity", "must be > 0"));
        }
        if !(self.util_threshold > 0.0 && self.util_threshold <= 1.0) {
            return Err(Error::schema(path + ".util_threshold", "must lie in (0, 1]"));
        }
        if self.instance_count == 0 {
            return Err(Error::schema(path + ".instance_count", "must be >= 1"));
        }
        if !(self.license_cost >= 0.0) {
            return Err(Error::schema(path + ".license_cost", "must be >= 0"));
        }
        Ok(())
    }
}

/// The set of VNF types known to the system, indexed by type id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VnfCatalog {
    types: Vec<VnfType>,
}

impl VnfCatalog {
    pub fn new(types: Vec<VnfType>) -> Result<Self> {
        for (idx, t) in types.iter().enumerate() {
            if t.id != idx {
                return Err(Error::schema(
                    format!("types[{idx}].id"),
                    format!("expected id {idx}, found {}", t.id),
                ));
            }
            t.validate()?;
        }
        Ok(Self { types })
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn get(&self, id: TypeId) -> Option<&VnfType> {
        self.types.get(id)
    }

    pub fn types(&self) -> &[VnfType] {
        &self.types
    }
}

impl std::ops::Index<TypeId> for VnfCatalog {
    type Output = VnfType;

    fn index(&self, id: TypeId) -> &VnfType {
        &self.types[id]
    }
}

/// A node of the structured forwarding graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphNode {
    Leaf {
        vnf: TypeId,
    },
    Seq {
        children: Vec<GraphNode>,
    },
    Par {
        children: Vec<GraphNode>,
    },
    Sel {
        children: Vec<GraphNode>,
        sel_probs: Vec<f64>,
    },
    Loop {
        children: Vec<GraphNode>,
        loop_prob: f64,
    },
}

impl GraphNode {
    pub fn leaf(vnf: TypeId) -> Self {
        GraphNode::Leaf { vnf }
    }

    pub fn seq(children: Vec<GraphNode>) -> Self {
        GraphNode::Seq { children }
    }

    pub fn par(children: Vec<GraphNode>) -> Self {
        GraphNode::Par { children }
    }

    pub fn sel(children: Vec<GraphNode>, sel_probs: Vec<f64>) -> Self {
        GraphNode::Sel {
            children,
            sel_probs,
        }
    }

    /// Selection with equal probability on every child.
    pub fn sel_uniform(children: Vec<GraphNode>) -> Self {
        let h = 1.0 / children.len() as f64;
        let probs = vec![h; children.len()];
        GraphNode::Sel {
            children,
            sel_probs: probs,
        }
    }

    pub fn looped(children: Vec<GraphNode>, loop_prob: f64) -> Self {
        GraphNode::Loop {
            children,
            loop_prob,
        }
    }

    pub fn children(&self) -> &[GraphNode] {
        match self {
            GraphNode::Leaf { .. } => &[],
            GraphNode::Seq { children }
            | GraphNode::Par { children }
            | GraphNode::Sel { children, .. }
            | GraphNode::Loop { children, .. } => children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, GraphNode::Leaf { .. })
    }

    /// Leaf types in depth-first (execution) order.
    pub fn leaves(&self) -> Vec<TypeId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<TypeId>) {
        match self {
            GraphNode::Leaf { vnf } => out.push(*vnf),
            _ => self.children().iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.children()
            .iter()
            .map(|c| c.height() + 1)
            .max()
            .unwrap_or(0)
    }

    fn validate(&self, path: &str) -> Result<()> {
        if self.is_leaf() {
            return Ok(());
        }
        let children = self.children();
        if children.len() < 2 {
            return Err(Error::MalformedTree(format!(
                "{path}: middle node has {} children, at least 2 required",
                children.len()
            )));
        }
        match self {
            GraphNode::Sel { sel_probs, .. } => {
                if sel_probs.len() != children.len() {
                    return Err(Error::MalformedTree(format!(
                        "{path}: {} selection probabilities for {} children",
                        sel_probs.len(),
                        children.len()
                    )));
                }
                if sel_probs.iter().any(|p| !(*p >= 0.0 && *p <= 1.0)) {
                    return Err(Error::MalformedTree(format!(
                        "{path}: selection probability outside [0, 1]"
                    )));
                }
                let sum: f64 = sel_probs.iter().sum();
                if (sum - 1.0).abs() > PROB_SUM_TOL {
                    return Err(Error::MalformedTree(format!(
                        "{path}: selection probabilities sum to {sum}"
                    )));
                }
            }
            GraphNode::Loop { loop_prob, .. } => {
                if !(*loop_prob >= 0.0 && *loop_prob < 1.0) {
                    return Err(Error::MalformedTree(format!(
                        "{path}: loop probability {loop_prob} outside [0, 1)"
                    )));
                }
            }
            _ => {}
        }
        for (i, c) in children.iter().enumerate() {
            c.validate(&format!("{path}.children[{i}]"))?;
        }
        Ok(())
    }
}

/// Expected number of loop iterations, `q / (1 - q)`.
pub fn expected_loop_iterations(q: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::Domain(format!("loop probability {q} outside [0, 1)")));
    }
    Ok(q / (1.0 - q))
}

/// One nonzero entry of the IoT communication / traffic matrices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IotLink {
    pub user: UserId,
    pub vnf: TypeId,
    /// Bytes exchanged between the user and the VNF.
    pub traffic: f64,
}

/// A validated structured VNF-FG request.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    id: usize,
    root: GraphNode,
    required_types: BTreeSet<TypeId>,
    traffic_in: BTreeMap<TypeId, f64>,
    iot: Vec<IotLink>,
    users: BTreeSet<UserId>,
    predecessors: BTreeMap<TypeId, BTreeSet<TypeId>>,
    load_weight: BTreeMap<TypeId, f64>,
    order: Vec<TypeId>,
}

impl Request {
    pub fn id(&self) -> usize {
        self.id
    }

    pub fn root(&self) -> &GraphNode {
        &self.root
    }

    pub fn required_types(&self) -> &BTreeSet<TypeId> {
        &self.required_types
    }

    /// Leaf types in execution order.
    pub fn vnfs(&self) -> &[TypeId] {
        &self.order
    }

    /// Traffic (bytes) received by `vnf` from its immediate predecessors.
    pub fn traffic_in(&self, vnf: TypeId) -> f64 {
        self.traffic_in.get(&vnf).copied().unwrap_or(0.0)
    }

    pub fn traffic_map(&self) -> &BTreeMap<TypeId, f64> {
        &self.traffic_in
    }

    pub fn iot(&self) -> &[IotLink] {
        &self.iot
    }

    /// IoT entries touching `vnf`.
    pub fn iot_of(&self, vnf: TypeId) -> impl Iterator<Item = &IotLink> {
        self.iot.iter().filter(move |l| l.vnf == vnf)
    }

    pub fn users(&self) -> &BTreeSet<UserId> {
        &self.users
    }

    pub fn communicates_with_iot(&self, vnf: TypeId) -> bool {
        self.iot.iter().any(|l| l.vnf == vnf)
    }

    /// The set of VNFs whose output feeds `vnf`.
    pub fn immediate_predecessors(&self, vnf: TypeId) -> Result<&BTreeSet<TypeId>> {
        self.predecessors.get(&vnf).ok_or(Error::UnknownVnf(vnf))
    }

    /// Expected executions of `vnf` per request: the product of selection
    /// probabilities and expected loop iterations on its root path.
    pub fn load_weight(&self, vnf: TypeId) -> f64 {
        self.load_weight.get(&vnf).copied().unwrap_or(0.0)
    }

    pub fn to_doc(&self) -> RequestDoc {
        RequestDoc {
            id: self.id,
            root: self.root.clone(),
            traffic: self.traffic_in.clone(),
            iot: self.iot.clone(),
        }
    }
}

/// Serialized form of a request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestDoc {
    pub id: usize,
    pub root: GraphNode,
    /// Traffic in bytes entering each VNF, keyed by type id.
    pub traffic: BTreeMap<TypeId, f64>,
    #[serde(default)]
    pub iot: Vec<IotLink>,
}

impl RequestDoc {
    pub fn build(self, catalog: &VnfCatalog) -> Result<Request> {
        build_request(self.id, self.root, self.traffic, self.iot, catalog)
    }
}

/// Validates a tree with its traffic and IoT annotations and precomputes
/// the predecessor relation.
pub fn build_request(
    id: usize,
    root: GraphNode,
    traffic_in: BTreeMap<TypeId, f64>,
    iot: Vec<IotLink>,
    catalog: &VnfCatalog,
) -> Result<Request> {
    root.validate("root")?;
    let order = root.leaves();
    let mut required_types = BTreeSet::new();
    for &t in &order {
        if catalog.get(t).is_none() {
            return Err(Error::MalformedTree(format!("leaf type {t} is not declared")));
        }
        if !required_types.insert(t) {
            return Err(Error::MalformedTree(format!("type {t} appears in more than one leaf")));
        }
    }
    for &t in &order {
        match traffic_in.get(&t) {
            Some(a) if *a >= 0.0 && a.is_finite() => {}
            Some(a) => {
                return Err(Error::MalformedTree(format!("traffic {a} for type {t} is invalid")))
            }
            None => return Err(Error::MalformedTree(format!("no traffic entry for type {t}"))),
        }
    }
    if let Some(extra) = traffic_in.keys().find(|t| !required_types.contains(t)) {
        return Err(Error::MalformedTree(format!("traffic given for type {extra} which is not a leaf")));
    }
    let mut seen = BTreeSet::new();
    for link in &iot {
        if !required_types.contains(&link.vnf) {
            return Err(Error::MalformedTree(format!(
                "IoT entry references type {} which is not a leaf",
                link.vnf
            )));
        }
        if !(link.traffic > 0.0 && link.traffic.is_finite()) {
            return Err(Error::MalformedTree(format!(
                "IoT traffic between user {} and type {} must be positive",
                link.user, link.vnf
            )));
        }
        if !seen.insert((link.user, link.vnf)) {
            return Err(Error::MalformedTree(format!(
                "duplicate IoT entry for user {} and type {}",
                link.user, link.vnf
            )));
        }
    }
    let users = iot.iter().map(|l| l.user).collect();

    let mut predecessors = BTreeMap::new();
    link_predecessors(&root, &BTreeSet::new(), &mut predecessors);
    let mut load_weight = BTreeMap::new();
    accumulate_weights(&root, 1.0, &mut load_weight);

    Ok(Request {
        id,
        root,
        required_types,
        traffic_in,
        iot,
        users,
        predecessors,
        load_weight,
        order,
    })
}

/// Assigns `preds` as the immediate predecessors of every entry leaf of
/// `node` and returns the node's exit leaves.
fn link_predecessors(
    node: &GraphNode,
    preds: &BTreeSet<TypeId>,
    out: &mut BTreeMap<TypeId, BTreeSet<TypeId>>,
) -> BTreeSet<TypeId> {
    match node {
        GraphNode::Leaf { vnf } => {
            out.insert(*vnf, preds.clone());
            BTreeSet::from([*vnf])
        }
        GraphNode::Seq { children } | GraphNode::Loop { children, .. } => {
            let mut current = preds.clone();
            for c in children {
                current = link_predecessors(c, &current, out);
            }
            current
        }
        GraphNode::Par { children } | GraphNode::Sel { children, .. } => {
            let mut exits = BTreeSet::new();
            for c in children {
                exits.extend(link_predecessors(c, preds, out));
            }
            exits
        }
    }
}

fn accumulate_weights(node: &GraphNode, weight: f64, out: &mut BTreeMap<TypeId, f64>) {
    match node {
        GraphNode::Leaf { vnf } => {
            out.insert(*vnf, weight);
        }
        GraphNode::Seq { children } | GraphNode::Par { children } => {
            children.iter().for_each(|c| accumulate_weights(c, weight, out))
        }
        GraphNode::Sel {
            children,
            sel_probs,
        } => children
            .iter()
            .zip(sel_probs)
            .for_each(|(c, h)| accumulate_weights(c, weight * h, out)),
        GraphNode::Loop {
            children,
            loop_prob,
        } => {
            let it = loop_prob / (1.0 - loop_prob);
            children
                .iter()
                .for_each(|c| accumulate_weights(c, weight * it, out))
        }
    }
}
