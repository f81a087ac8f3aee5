//! Structured VNF forwarding graphs: types, request trees, predecessor
//! relation and the synthetic workload generator.

mod generator;
mod samples;
mod tree;

pub use generator::{fork_join_tree, generate_catalog, generate_workload, Workload, WorkloadParams};
pub use samples::{earthquake_request, earthquake_tree, EARTHQUAKE_COMPONENTS};
pub use tree::{
    build_request, expected_loop_iterations, GraphNode, IotLink, Request, RequestDoc, TypeId,
    UserId, VnfCatalog, VnfType,
};
