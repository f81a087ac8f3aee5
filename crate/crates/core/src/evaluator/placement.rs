use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infra::NodeId;
use crate::vnffg::{TypeId, VnfCatalog};

/// Instance of a VNF type serving one request, and the node it runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    pub instance: usize,
    pub node: NodeId,
}

/// Deployment and assignment decisions.
///
/// `deployed[t][i]` is the host of instance `i` of type `t`, if deployed.
/// `assigned[r][t]` is the instance of type `t` serving request `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub deployed: Vec<Vec<Option<NodeId>>>,
    pub assigned: Vec<Vec<Option<Assignment>>>,
}

impl Placement {
    /// Nothing deployed, nothing assigned.
    pub fn empty(catalog: &VnfCatalog, requests: usize) -> Self {
        Self {
            deployed: catalog
                .types()
                .iter()
                .map(|t| vec![None; t.instance_count])
                .collect(),
            assigned: vec![vec![None; catalog.len()]; requests],
        }
    }

    pub fn host(&self, t: TypeId, instance: usize) -> Option<NodeId> {
        self.deployed.get(t)?.get(instance).copied().flatten()
    }

    pub fn assignment(&self, request: usize, t: TypeId) -> Option<Assignment> {
        self.assigned.get(request)?.get(t).copied().flatten()
    }

    /// Node serving type `t` of `request`.
    pub fn node_of(&self, request: usize, t: TypeId) -> Result<NodeId> {
        self.assignment(request, t)
            .map(|a| a.node)
            .ok_or(Error::UnassignedVnf { request, vnf: t })
    }

    /// Deploys instance `i` of `t` on `node`.
    pub fn deploy(&mut self, t: TypeId, instance: usize, node: NodeId) {
        self.deployed[t][instance] = Some(node);
    }

    /// Assigns instance `i` of `t` to `request`, at the instance's current host.
    pub fn assign(&mut self, request: usize, t: TypeId, instance: usize) {
        let node = self.deployed[t][instance].expect("assigning an undeployed instance");
        self.assigned[request][t] = Some(Assignment { instance, node });
    }

    /// Deployed instances as `(type, instance, node)`.
    pub fn deployments(&self) -> impl Iterator<Item = (TypeId, usize, NodeId)> + '_ {
        self.deployed.iter().enumerate().flat_map(|(t, slots)| {
            slots
                .iter()
                .enumerate()
                .filter_map(move |(i, n)| n.map(|n| (t, i, n)))
        })
    }

    pub fn deployed_count(&self, t: TypeId) -> usize {
        self.deployed[t].iter().filter(|n| n.is_some()).count()
    }

    /// Requests currently assigned to instance `i` of `t`.
    pub fn users_of(&self, t: TypeId, instance: usize) -> impl Iterator<Item = usize> + '_ {
        self.assigned
            .iter()
            .enumerate()
            .filter(move |(_, a)| matches!(a[t], Some(x) if x.instance == instance))
            .map(|(r, _)| r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("placement serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::schema(e.path().to_string(), e.into_inner().to_string()))
    }

    /// Checks that the shape matches `catalog` and `requests`.
    pub fn check_shape(&self, catalog: &VnfCatalog, requests: usize) -> Result<()> {
        if self.deployed.len() != catalog.len() {
            return Err(Error::schema("deployed", format!("expected {} types", catalog.len())));
        }
        for (t, slots) in self.deployed.iter().enumerate() {
            if slots.len() != catalog[t].instance_count {
                return Err(Error::schema(
                    format!("deployed[{t}]"),
                    format!("expected {} instances", catalog[t].instance_count),
                ));
            }
        }
        if self.assigned.len() != requests {
            return Err(Error::schema("assigned", format!("expected {requests} requests")));
        }
        for (r, row) in self.assigned.iter().enumerate() {
            if row.len() != catalog.len() {
                return Err(Error::schema(format!("assigned[{r}]"), "one entry per type required"));
            }
            for (t, a) in row.iter().enumerate() {
                if let Some(a) = a {
                    if a.instance >= catalog[t].instance_count {
                        return Err(Error::schema(
                            format!("assigned[{r}][{t}].instance"),
                            "instance index out of range",
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}
