//! Tabu search over placements, the baselines it is compared against and an
//! exhaustive oracle for tiny instances.

mod baselines;
mod exhaustive;
mod moves;
mod tabu;

pub use baselines::{greedy_place, initial_placement, psf_place};
pub use exhaustive::{exhaustive_optimal, ExhaustiveLimits};
pub use moves::{apply_move, propose_moves, revert, Location, Move, MoveKind, MoveSubject, TabuKey, TargetRule, Undo};
pub use tabu::{penalty_scale, tabu_random_explore, tabu_search, SolveResult, TabuParams, TraceRow};

use crate::error::Result;
use crate::evaluator::Problem;
use crate::infra::{build_scenario, NodeDoc, ScenarioDoc, Tier};
use crate::vnffg::{generate_workload, WorkloadParams};

/// A random instance inside the default exhaustive limits: one cloud node
/// and up to three fog nodes, three types with two instances each, up to
/// three requests of two or three VNFs.
pub fn tiny_problem(seed: u64) -> Result<Problem> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let fogs = rng.random_range(1..=3);
    let requests = rng.random_range(1..=3);
    let node = |tier| NodeDoc {
        tier,
        capacity: None,
        usage_threshold: None,
        unit_cost: None,
        proc_ms_per_mb: None,
        location: None,
        mobility: None,
    };
    let mut doc = ScenarioDoc {
        seed,
        nodes: std::iter::once(node(Tier::Cloud))
            .chain((0..fogs).map(|_| node(Tier::Fog)))
            .collect(),
        ..ScenarioDoc::default()
    };
    doc.params.user_count = 2;
    let network = build_scenario(&doc)?;
    let params = WorkloadParams {
        vnf_count: (2, 3),
        heights: vec![1, 2],
        type_count: 3,
        resource_req: (1, 2),
        instances_per_type: 2,
        user_count: 2,
        users_per_request: (1, 2),
        iot_vnfs: (1, 1),
        ..WorkloadParams::default()
    };
    let w = generate_workload(requests, seed, &params)?;
    Problem::new(network, w.catalog, w.requests)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::evaluator::{ObjectiveWeights, PenaltyScale, Placement};
    use crate::infra::{default_link_classes, preset_network, NetworkModel, NodeSpec, Preset};
    use crate::mobility::{MobilityProfile, Point};
    use crate::units::{ms_per_mb, GB, MB};
    use crate::vnffg::{build_request, GraphNode, VnfCatalog, VnfType};

    fn spec(id: usize, tier: Tier, capacity: f64, cost: f64, at: Point) -> NodeSpec {
        NodeSpec {
            id,
            tier,
            capacity,
            usage_threshold: 1.0,
            unit_cost: cost,
            proc_delay: ms_per_mb(if tier == Tier::Cloud { 0.25 } else { 25.0 }),
            proc_delay_by_type: BTreeMap::new(),
            mobility: MobilityProfile::fixed(at),
        }
    }

    /// One type, one request, two nodes; node 1 is cheaper in every way.
    fn two_nodes() -> Problem {
        let net = NetworkModel::new(
            vec![
                spec(0, Tier::Cloud, 8.0, 4.0, Point::new(0.1, 0.1)),
                spec(1, Tier::Cloud, 8.0, 2.5, Point::new(0.1, 0.1)),
            ],
            default_link_classes(),
            vec![],
        )
        .unwrap();
        let cat = VnfCatalog::new(vec![VnfType {
            id: 0,
            resource_req: 2.0,
            capacity: GB,
            license_cost: 10.0,
            util_threshold: 1.0,
            instance_count: 1,
        }])
        .unwrap();
        let req = build_request(0, GraphNode::leaf(0), BTreeMap::from([(0, MB)]), vec![], &cat).unwrap();
        Problem::new(net, cat, vec![req]).unwrap()
    }

    fn topology10(requests: usize, seed: u64) -> Problem {
        let net = preset_network(Preset::Topology10, seed).unwrap();
        let w = generate_workload(requests, seed, &WorkloadParams::default()).unwrap();
        Problem::new(net, w.catalog, w.requests).unwrap()
    }

    #[test]
    fn initial_placement_is_deterministic_and_complete() {
        let pb = topology10(5, 3);
        let a = initial_placement(&pb, 9);
        assert_eq!(a, initial_placement(&pb, 9));
        for (r, req) in pb.requests().iter().enumerate() {
            for &t in req.vnfs() {
                let s = a.assignment(r, t).unwrap();
                assert_eq!(a.host(t, s.instance), Some(s.node));
            }
        }
        let mut iot_on_fog = 0;
        for &t in pb.required_types() {
            assert_eq!(a.deployed_count(t), 1);
            let tier = pb.network().node(a.host(t, 0).unwrap()).tier;
            if pb.requests().iter().any(|r| r.communicates_with_iot(t)) && tier == Tier::Fog {
                iot_on_fog += 1;
            }
        }
        // Fog capacity runs out before every IoT facing type is placed.
        assert!(iot_on_fog > 0);
    }

    #[test]
    fn dominating_node_is_the_target() {
        let pb = two_nodes();
        let w = ObjectiveWeights::new(0.5).unwrap();
        let mut p = Placement::empty(pb.catalog(), 1);
        p.deploy(0, 0, 0);
        p.assign(0, 0, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let moves = propose_moves(&pb, &p, &w, TargetRule::BestScore, &mut rng, 8).unwrap();
        for mv in moves {
            match mv.target {
                Location::Node(n) => assert_eq!(n, 1),
                Location::Instance { node, .. } => assert_eq!(node, 1),
            }
        }
    }

    #[test]
    fn single_node_has_no_move() {
        let net = NetworkModel::new(
            vec![spec(0, Tier::Cloud, 8.0, 3.0, Point::new(0.5, 0.5))],
            default_link_classes(),
            vec![],
        )
        .unwrap();
        let pb = two_nodes().with_network(net).unwrap();
        let p = initial_placement(&pb, 0);
        let w = ObjectiveWeights::new(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            propose_moves(&pb, &p, &w, TargetRule::BestScore, &mut rng, 4),
            Err(crate::Error::NoMoveAvailable)
        );
        let res = tabu_search(&pb, &TabuParams::new(0.5, 0).unwrap()).unwrap();
        assert_eq!(res.placement, p);
    }

    #[test]
    fn tabu_matches_exhaustive_on_two_nodes() {
        let pb = two_nodes();
        let params = TabuParams::new(0.5, 4).unwrap();
        let scale = penalty_scale(&pb, &params.weights, 4).unwrap();
        let tabu = tabu_search(&pb, &params).unwrap();
        let ex = exhaustive_optimal(&pb, &params.weights, scale, &ExhaustiveLimits::default()).unwrap();
        assert_eq!(ex.evaluations, 2);
        assert_eq!(tabu.fitness, ex.fitness);
        assert_eq!(ex.placement.host(0, 0), Some(1));
    }

    #[test]
    fn exhaustive_refuses_large_instances() {
        let pb = topology10(2, 1);
        let w = ObjectiveWeights::new(0.5).unwrap();
        assert!(matches!(
            exhaustive_optimal(&pb, &w, PenaltyScale(1.0), &ExhaustiveLimits::default()),
            Err(crate::Error::TooLarge(_))
        ));
    }

    #[test]
    fn tabu_trace_and_determinism() {
        let pb = topology10(5, 2);
        let params = TabuParams::new(0.5, 11).unwrap();
        let a = tabu_search(&pb, &params).unwrap();
        let b = tabu_search(&pb, &params).unwrap();
        assert_eq!(a.placement, b.placement);
        assert_eq!(a.fitness, b.fitness);
        assert!(a.trace.windows(2).all(|w| w[1].best <= w[0].best));
        let last = a.trace.last().unwrap();
        assert_eq!(last.best, a.fitness);
        // The run ends after stop_after + 1 non-improving iterations.
        let improved = a
            .trace
            .windows(2)
            .rposition(|w| w[1].best < w[0].best)
            .map_or(0, |i| i + 1);
        assert_eq!(last.iteration - a.trace[improved].iteration, params.stop_after + 1);
        let scale = penalty_scale(&pb, &params.weights, 11).unwrap();
        assert_eq!(pb.fitness(&a.placement, &params.weights, scale).unwrap(), a.fitness);

        let mut buf = Vec::new();
        a.write_trace(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,fitness,best,move_kind,elapsed_ms\n"));
        assert_eq!(text.lines().count(), a.trace.len() + 1);
    }

    #[test]
    fn tabu_improves_on_start() {
        let pb = topology10(8, 5);
        let params = TabuParams::new(0.5, 5).unwrap();
        let scale = penalty_scale(&pb, &params.weights, 5).unwrap();
        let start = pb.fitness(&initial_placement(&pb, 5), &params.weights, scale).unwrap();
        for res in [tabu_search(&pb, &params).unwrap(), tabu_random_explore(&pb, &params).unwrap()] {
            assert!(res.fitness < start, "{} vs {start}", res.fitness);
        }
    }

    #[test]
    fn greedy_first_fit_and_reuse() {
        let pb = two_nodes();
        let p = greedy_place(&pb);
        assert_eq!(p.host(0, 0), Some(0));

        let pb = topology10(6, 4);
        let p = greedy_place(&pb);
        for (r, req) in pb.requests().iter().enumerate() {
            for &t in req.vnfs() {
                assert!(p.assignment(r, t).is_some());
            }
        }
        // Small requests fit one instance per type.
        for &t in pb.required_types() {
            assert!(p.deployed_count(t) >= 1);
        }
    }

    #[test]
    fn psf_equals_tabu_when_static() {
        let pb = topology10(5, 6);
        let net = pb.network().with_static_nodes();
        let pb = pb.with_network(net).unwrap();
        let params = TabuParams::new(0.5, 6).unwrap();
        let a = tabu_search(&pb, &params).unwrap();
        let b = psf_place(&pb, &params).unwrap();
        assert_eq!(a.fitness, b.fitness);
        assert_eq!(a.placement, b.placement);
    }

    #[test]
    fn tiny_problems_fit_limits() {
        for seed in 0..20 {
            let pb = tiny_problem(seed).unwrap();
            ExhaustiveLimits::default().check(&pb).unwrap();
        }
    }

    #[test]
    fn exhaustive_not_worse_than_tabu_on_tiny() {
        for seed in 0..4 {
            let pb = tiny_problem(seed).unwrap();
            let params = TabuParams::new(0.5, seed).unwrap();
            let scale = penalty_scale(&pb, &params.weights, seed).unwrap();
            let ex = exhaustive_optimal(&pb, &params.weights, scale, &ExhaustiveLimits::default()).unwrap();
            let tabu = tabu_search(&pb, &params).unwrap();
            assert!(ex.fitness <= tabu.fitness + 1e-9, "{} > {}", ex.fitness, tabu.fitness);
        }
    }

    #[test]
    fn tabu_entries_expire_after_tenure() {
        // With a tenure of 1 a reversal is forbidden only in the very next
        // iteration; check via the key arithmetic used by the loop.
        let mv = Move {
            kind: MoveKind::VnfReassign,
            subject: MoveSubject::Instance(0, 0),
            source: Location::Node(0),
            target: Location::Node(1),
        };
        let back = Move {
            source: Location::Node(1),
            target: Location::Node(0),
            ..mv
        };
        assert_eq!(mv.reverse_key(), back.key());
        assert_ne!(mv.key(), back.key());
        let bulk = Move {
            kind: MoveKind::BulkVnfReassign,
            subject: MoveSubject::Node(0),
            ..mv
        };
        let bulk_back = Move {
            subject: MoveSubject::Node(1),
            source: Location::Node(1),
            target: Location::Node(0),
            ..bulk
        };
        assert_eq!(bulk.reverse_key(), bulk_back.key());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn apply_then_revert_restores(seed in 0u64..1000, steps in 1usize..8) {
            let pb = topology10(4, seed % 5);
            let w = ObjectiveWeights::new(0.5).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut p = initial_placement(&pb, seed);
            let rule = if seed % 2 == 0 { TargetRule::BestScore } else { TargetRule::Random };
            let mut history = Vec::new();
            for _ in 0..steps {
                let Ok(moves) = propose_moves(&pb, &p, &w, rule, &mut rng, 4) else { break };
                for mv in &moves {
                    let before = p.clone();
                    let undo = apply_move(&mut p, mv);
                    revert(&mut p, undo);
                    prop_assert_eq!(&p, &before);
                }
                let before = p.clone();
                let undo = apply_move(&mut p, &moves[0]);
                history.push((before, undo));
            }
            while let Some((before, undo)) = history.pop() {
                revert(&mut p, undo);
                prop_assert_eq!(&p, &before);
            }
        }
    }
}
