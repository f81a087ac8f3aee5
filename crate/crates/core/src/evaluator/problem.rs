use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::infra::{build_cache, ExpectedLinkCache, NetworkModel};
use crate::vnffg::{expected_loop_iterations, GraphNode, Request, TypeId, VnfCatalog};

/// Block kinds of a compiled tree.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Step {
    Leaf(TypeId),
    Seq(usize),
    Par(usize),
    Sel(Vec<f64>),
    /// Arity and loop probability.
    Loop(usize, f64),
}

/// Post-order flattening of a request tree.
pub(crate) fn compile(root: &GraphNode) -> Result<Vec<Step>> {
    let mut out = Vec::new();
    push_steps(root, &mut out)?;
    Ok(out)
}

fn push_steps(node: &GraphNode, out: &mut Vec<Step>) -> Result<()> {
    for c in node.children() {
        push_steps(c, out)?;
    }
    let n = node.children().len();
    out.push(match node {
        GraphNode::Leaf { vnf } => Step::Leaf(*vnf),
        GraphNode::Seq { .. } => Step::Seq(n),
        GraphNode::Par { .. } => Step::Par(n),
        GraphNode::Sel { sel_probs, .. } => Step::Sel(sel_probs.clone()),
        GraphNode::Loop { loop_prob, .. } => {
            expected_loop_iterations(*loop_prob)?;
            Step::Loop(n, *loop_prob)
        }
    });
    Ok(())
}

/// Everything a placement is evaluated against: the network with its link
/// cache, the VNF catalog and the requests.
#[derive(Debug, Clone)]
pub struct Problem {
    catalog: VnfCatalog,
    network: NetworkModel,
    cache: ExpectedLinkCache,
    requests: Vec<Request>,
    plans: Vec<Vec<Step>>,
    required: BTreeSet<TypeId>,
}

impl Problem {
    /// Builds the link cache for `network` and validates the requests.
    pub fn new(network: NetworkModel, catalog: VnfCatalog, requests: Vec<Request>) -> Result<Self> {
        let cache = build_cache(&network)?;
        Self::with_cache(network, cache, catalog, requests)
    }

    pub fn with_cache(
        network: NetworkModel,
        cache: ExpectedLinkCache,
        catalog: VnfCatalog,
        requests: Vec<Request>,
    ) -> Result<Self> {
        if cache.node_count() != network.len() || cache.user_count() != network.users().len() {
            return Err(Error::schema("cache", "does not match the network"));
        }
        let mut required = BTreeSet::new();
        let mut plans = Vec::with_capacity(requests.len());
        for (r, req) in requests.iter().enumerate() {
            for &t in req.required_types() {
                if catalog.get(t).is_none() {
                    return Err(Error::UnknownVnf(t));
                }
                required.insert(t);
            }
            if let Some(l) = req.iot().iter().find(|l| l.user >= network.users().len()) {
                return Err(Error::schema(
                    format!("requests[{r}].iot"),
                    format!("user {} is not part of the network", l.user),
                ));
            }
            plans.push(compile(req.root())?);
        }
        Ok(Self {
            catalog,
            network,
            cache,
            requests,
            plans,
            required,
        })
    }

    pub fn catalog(&self) -> &VnfCatalog {
        &self.catalog
    }

    pub fn network(&self) -> &NetworkModel {
        &self.network
    }

    pub fn cache(&self) -> &ExpectedLinkCache {
        &self.cache
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn request(&self, r: usize) -> &Request {
        &self.requests[r]
    }

    /// Types required by at least one request.
    pub fn required_types(&self) -> &BTreeSet<TypeId> {
        &self.required
    }

    pub(crate) fn plan(&self, r: usize) -> &[Step] {
        &self.plans[r]
    }

    /// Same requests against a different network over the same node ids.
    pub fn with_network(&self, network: NetworkModel) -> Result<Self> {
        Self::new(network, self.catalog.clone(), self.requests.clone())
    }
}
