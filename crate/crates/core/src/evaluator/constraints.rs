//! Capacity, bandwidth and structural constraints of a placement.

use serde::{Deserialize, Serialize};

use super::placement::Placement;
use super::problem::Problem;
use crate::infra::NodeId;
use crate::units::bits;
use crate::vnffg::{TypeId, UserId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    /// Processing units deployed on a node within its usable capacity.
    NodeCapacity,
    /// Expected bits per request between two nodes within the link bandwidth.
    LinkBandwidth,
    /// Same for a node-user link.
    UserLinkBandwidth,
    /// Traffic served by one VNF instance within its capacity.
    InstanceCapacity,
    /// A request is assigned to an instance that is not deployed where it claims.
    AssignedNotDeployed,
    /// A required type has no deployed instance.
    TypeNotDeployed,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::NodeCapacity => "node-capacity",
            ConstraintKind::LinkBandwidth => "link-bandwidth",
            ConstraintKind::UserLinkBandwidth => "user-link-bandwidth",
            ConstraintKind::InstanceCapacity => "instance-capacity",
            ConstraintKind::AssignedNotDeployed => "assigned-not-deployed",
            ConstraintKind::TypeNotDeployed => "type-not-deployed",
        }
    }

    /// Whether the right-hand side is a capacity that scales the penalty.
    pub fn is_capacity(self) -> bool {
        !matches!(
            self,
            ConstraintKind::AssignedNotDeployed | ConstraintKind::TypeNotDeployed
        )
    }
}

/// What a violated constraint instance refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subject {
    Node(NodeId),
    /// Traffic from the first node to the second.
    Link(NodeId, NodeId),
    UserLink(NodeId, UserId),
    Instance(TypeId, usize),
    Assignment(usize, TypeId),
    Type(TypeId),
}

/// A violated constraint `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ConstraintKind,
    pub subject: Subject,
    pub lhs: f64,
    pub rhs: f64,
}

impl Violation {
    /// `max(0, lhs - rhs)`.
    pub fn excess(&self) -> f64 {
        (self.lhs - self.rhs).max(0.0)
    }
}

impl Problem {
    /// Every violated constraint instance of `p`, in a fixed order.
    pub fn check_constraints(&self, p: &Placement) -> Vec<Violation> {
        let mut out = Vec::new();
        self.visit_violations(p, |v| out.push(v));
        out
    }

    pub(crate) fn visit_violations(&self, p: &Placement, mut emit: impl FnMut(Violation)) {
        let net = self.network();
        let n_nodes = net.len();
        let n_users = net.users().len();

        let mut used = vec![0.0; n_nodes];
        for (t, _, n) in p.deployments() {
            used[n] += self.catalog()[t].resource_req;
        }
        for (n, &u) in used.iter().enumerate() {
            let cap = net.node(n).usable_capacity();
            if u > cap {
                emit(Violation {
                    kind: ConstraintKind::NodeCapacity,
                    subject: Subject::Node(n),
                    lhs: u,
                    rhs: cap,
                });
            }
        }

        let mut link = vec![0.0; n_nodes * n_nodes];
        let mut user_link = vec![0.0; n_nodes * n_users];
        let mut instance: Vec<Vec<f64>> = p.deployed.iter().map(|s| vec![0.0; s.len()]).collect();
        let mut misassigned = Vec::new();
        for (r, req) in self.requests().iter().enumerate() {
            for &t in req.vnfs() {
                let Some(a) = p.assignment(r, t) else { continue };
                let w = req.load_weight(t);
                let traffic = req.traffic_in(t);
                for &pred in req.immediate_predecessors(t).expect("leaf of request") {
                    if let Some(src) = p.assignment(r, pred) {
                        if src.node != a.node {
                            link[src.node * n_nodes + a.node] += w * bits(traffic);
                        }
                    }
                }
                let mut served = traffic;
                for l in req.iot_of(t) {
                    user_link[a.node * n_users + l.user] += w * bits(l.traffic);
                    served += l.traffic;
                }
                instance[t][a.instance] += w * served;
                if p.host(t, a.instance) != Some(a.node) {
                    misassigned.push((r, t));
                }
            }
        }

        for from in 0..n_nodes {
            for to in 0..n_nodes {
                let load = link[from * n_nodes + to];
                if from == to || load == 0.0 {
                    continue;
                }
                let cap = net.class_between(from, to).bw_threshold * self.cache().between(from, to).bandwidth;
                if load > cap {
                    emit(Violation {
                        kind: ConstraintKind::LinkBandwidth,
                        subject: Subject::Link(from, to),
                        lhs: load,
                        rhs: cap,
                    });
                }
            }
        }
        for n in 0..n_nodes {
            for u in 0..n_users {
                let load = user_link[n * n_users + u];
                if load == 0.0 {
                    continue;
                }
                let cap = net.class_to_user(n).bw_threshold * self.cache().to_user(n, u).bandwidth;
                if load > cap {
                    emit(Violation {
                        kind: ConstraintKind::UserLinkBandwidth,
                        subject: Subject::UserLink(n, u),
                        lhs: load,
                        rhs: cap,
                    });
                }
            }
        }
        for (t, loads) in instance.iter().enumerate() {
            let ty = &self.catalog()[t];
            let cap = ty.util_threshold * ty.capacity;
            for (i, &load) in loads.iter().enumerate() {
                if load > cap {
                    emit(Violation {
                        kind: ConstraintKind::InstanceCapacity,
                        subject: Subject::Instance(t, i),
                        lhs: load,
                        rhs: cap,
                    });
                }
            }
        }
        for (r, t) in misassigned {
            emit(Violation {
                kind: ConstraintKind::AssignedNotDeployed,
                subject: Subject::Assignment(r, t),
                lhs: 1.0,
                rhs: 0.0,
            });
        }
        for &t in self.required_types() {
            if p.deployed_count(t) == 0 {
                emit(Violation {
                    kind: ConstraintKind::TypeNotDeployed,
                    subject: Subject::Type(t),
                    lhs: 1.0,
                    rhs: 0.0,
                });
            }
        }
    }
}
