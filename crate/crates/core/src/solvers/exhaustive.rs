use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::tabu::SolveResult;
use crate::error::{Error, Result};
use crate::evaluator::{ObjectiveWeights, PenaltyScale, Placement, Problem};
use crate::infra::NodeId;
use crate::vnffg::TypeId;

/// Largest instance the oracle agrees to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustiveLimits {
    pub max_nodes: usize,
    pub max_types: usize,
    pub max_instances: usize,
    pub max_requests: usize,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        Self {
            max_nodes: 4,
            max_types: 3,
            max_instances: 2,
            max_requests: 3,
        }
    }
}

impl ExhaustiveLimits {
    pub fn check(&self, problem: &Problem) -> Result<()> {
        let too = |what: &str, got: usize, max: usize| {
            Err(Error::TooLarge(format!("{got} {what}, at most {max} allowed")))
        };
        let nodes = problem.network().len();
        let types = problem.required_types().len();
        let requests = problem.requests().len();
        let instances = problem
            .required_types()
            .iter()
            .map(|&t| problem.catalog()[t].instance_count)
            .max()
            .unwrap_or(0);
        if nodes > self.max_nodes {
            return too("nodes", nodes, self.max_nodes);
        }
        if types > self.max_types {
            return too("types", types, self.max_types);
        }
        if instances > self.max_instances {
            return too("instances per type", instances, self.max_instances);
        }
        if requests > self.max_requests {
            return too("requests", requests, self.max_requests);
        }
        Ok(())
    }
}

/// Every way to serve the requests using type `t`: `k` instances on any
/// nodes, requests mapped onto them so that each instance serves someone.
/// Instances are numbered by the first request they serve.
fn type_options(nodes: usize, instances: usize, users: usize) -> Vec<(Vec<NodeId>, Vec<usize>)> {
    let mut out = Vec::new();
    for k in 1..=instances.min(users) {
        let mut labels = Vec::new();
        growth_strings(users, k, &mut vec![], &mut labels);
        let mut hosts = vec![0; k];
        loop {
            for l in &labels {
                out.push((hosts.clone(), l.clone()));
            }
            let mut d = 0;
            while d < k && hosts[d] + 1 == nodes {
                hosts[d] = 0;
                d += 1;
            }
            if d == k {
                break;
            }
            hosts[d] += 1;
        }
    }
    out
}

/// Restricted growth strings of length `len` using exactly `k` labels.
fn growth_strings(len: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let top = prefix.iter().max().map_or(0, |m| m + 1);
    if prefix.len() == len {
        if top == k {
            out.push(prefix.clone());
        }
        return;
    }
    if top + (len - prefix.len()) < k {
        return;
    }
    for l in 0..=top.min(k - 1) {
        prefix.push(l);
        growth_strings(len, k, prefix, out);
        prefix.pop();
    }
}

/// Exact minimum by enumeration of every deployment and assignment that
/// serves each request from a deployed instance with no idle instance. The
/// best feasible placement wins; if none is feasible, the lowest fitness.
/// `evaluations` in the result counts enumerated placements.
pub fn exhaustive_optimal(
    problem: &Problem,
    weights: &ObjectiveWeights,
    scale: PenaltyScale,
    limits: &ExhaustiveLimits,
) -> Result<SolveResult> {
    limits.check(problem)?;
    let start = Instant::now();
    let nodes = problem.network().len();
    let types: Vec<TypeId> = problem.required_types().iter().copied().collect();
    let users: Vec<Vec<usize>> = types
        .iter()
        .map(|&t| {
            (0..problem.requests().len())
                .filter(|&r| problem.request(r).required_types().contains(&t))
                .collect()
        })
        .collect();
    let options: Vec<_> = types
        .iter()
        .zip(&users)
        .map(|(&t, u)| type_options(nodes, problem.catalog()[t].instance_count, u.len()))
        .collect();

    let mut p = Placement::empty(problem.catalog(), problem.requests().len());
    let mut choice = vec![0; types.len()];
    let mut evaluations = 0;
    let mut best_feasible: Option<(f64, Placement)> = None;
    let mut best_any: Option<(f64, Placement)> = None;
    'outer: loop {
        for (k, &t) in types.iter().enumerate() {
            let (hosts, labels) = &options[k][choice[k]];
            for slot in p.deployed[t].iter_mut() {
                *slot = None;
            }
            for (i, &n) in hosts.iter().enumerate() {
                p.deploy(t, i, n);
            }
            for (&r, &i) in users[k].iter().zip(labels) {
                p.assign(r, t, i);
            }
        }
        let obj = problem.objective(&p, weights)?;
        let mut penalty = 0.0;
        let mut feasible = true;
        problem.visit_violations(&p, |v| {
            feasible = false;
            penalty += scale.coefficient(&v) * v.excess();
        });
        let fit = obj + penalty;
        evaluations += 1;
        if feasible && best_feasible.as_ref().is_none_or(|(b, _)| fit < *b) {
            best_feasible = Some((fit, p.clone()));
        }
        if best_any.as_ref().is_none_or(|(b, _)| fit < *b) {
            best_any = Some((fit, p.clone()));
        }

        let mut d = 0;
        while d < types.len() && choice[d] + 1 == options[d].len() {
            choice[d] = 0;
            d += 1;
        }
        if d == types.len() {
            break 'outer;
        }
        choice[d] += 1;
    }

    let (fitness, placement) = best_feasible
        .or(best_any)
        .unwrap_or_else(|| (0.0, p.clone()));
    Ok(SolveResult {
        placement,
        fitness,
        trace: Vec::new(),
        evaluations,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_strings_count_surjections_up_to_relabeling() {
        let mut out = Vec::new();
        growth_strings(3, 2, &mut vec![], &mut out);
        assert_eq!(out, vec![vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]);
        let mut one = Vec::new();
        growth_strings(3, 1, &mut vec![], &mut one);
        assert_eq!(one, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn option_counts() {
        assert_eq!(type_options(2, 1, 1).len(), 2);
        // One instance on 4 nodes, or two on 16 node pairs times 3 splits.
        assert_eq!(type_options(4, 2, 3).len(), 4 + 16 * 3);
        assert_eq!(type_options(4, 2, 1).len(), 4);
    }
}
