use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vnffg::{RequestDoc, VnfCatalog, VnfType, Workload};

/// Serialized catalog plus requests.
///
/// ```json
/// { "types": [{ "id": 0, "resource_req": 2, "capacity": 1e9,
///               "license_cost": 100, "util_threshold": 1, "instance_count": 3 }],
///   "requests": [{ "id": 0, "root": { "kind": "leaf", "vnf": 0 },
///                  "traffic": { "0": 80000 },
///                  "iot": [{ "user": 0, "vnf": 0, "traffic": 1000 }] }] }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkloadDoc {
    pub types: Vec<VnfType>,
    pub requests: Vec<RequestDoc>,
}

impl WorkloadDoc {
    pub fn from_workload(w: &Workload) -> Self {
        Self {
            types: w.catalog.types().to_vec(),
            requests: w.requests.iter().map(|r| r.to_doc()).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("workload serializes")
    }

    /// Validates the catalog and every request tree.
    pub fn build(self) -> Result<Workload> {
        let catalog = VnfCatalog::new(self.types)?;
        let requests = self
            .requests
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                if r.id != i {
                    return Err(Error::schema(format!("requests[{i}].id"), format!("expected {i}")));
                }
                r.build(&catalog)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Workload { catalog, requests })
    }
}

/// JSON with schema errors carrying the offending field path.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        Error::schema(path, e.into_inner().to_string())
    })
}
