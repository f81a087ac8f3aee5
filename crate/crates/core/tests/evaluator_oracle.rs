mod common;

use common::{naive_request, predecessors, random_placement, rel_close};
use fogplace::evaluator::{ObjectiveWeights, PenaltyScale, Problem};
use fogplace::infra::{preset_network, Preset};
use fogplace::units::KB;
use fogplace::vnffg::{earthquake_request, generate_workload, VnfCatalog, VnfType, WorkloadParams};

fn workload_problem(requests: usize, seed: u64) -> Problem {
    let net = preset_network(Preset::Topology10, seed).unwrap();
    let w = generate_workload(requests, seed, &WorkloadParams::default()).unwrap();
    Problem::new(net, w.catalog, w.requests).unwrap()
}

#[test]
fn bottom_up_matches_recursion_on_generated_trees() {
    let problem = workload_problem(100, 5);
    let mut checked = 0;
    for k in 0..10 {
        let p = random_placement(&problem, 100 + k);
        for r in 0..problem.requests().len() {
            let (proc, comm, cost) = naive_request(&problem, &p, r);
            let m = problem.request_metrics(&p, r).unwrap();
            assert!(rel_close(m.proc_time, proc, 1e-12), "r{r} proc {} vs {proc}", m.proc_time);
            assert!(rel_close(m.comm_time, comm, 1e-12), "r{r} comm {} vs {comm}", m.comm_time);
            assert!(rel_close(m.comm_cost, cost, 1e-12), "r{r} cost {} vs {cost}", m.comm_cost);
            assert!(rel_close(problem.request_makespan(&p, r).unwrap(), proc + comm, 1e-12));
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn predecessor_relation_matches_recursive_definition() {
    let problem = workload_problem(60, 9);
    for req in problem.requests() {
        for &t in req.required_types() {
            assert_eq!(req.immediate_predecessors(t).unwrap(), &predecessors(req.root(), t), "type {t}");
        }
    }
}

#[test]
fn earthquake_tree_on_topology_10() {
    let catalog = VnfCatalog::new(
        (0..9)
            .map(|id| VnfType {
                id,
                resource_req: 1.0,
                capacity: 1e9,
                license_cost: 100.0,
                util_threshold: 1.0,
                instance_count: 1,
            })
            .collect(),
    )
    .unwrap();
    let req = earthquake_request(0, 40.0 * KB, &catalog).unwrap();
    // Responders follow the victim chain; the alert issuer follows the analyzer.
    assert_eq!(req.immediate_predecessors(6).unwrap().iter().copied().collect::<Vec<_>>(), vec![5]);
    assert_eq!(req.immediate_predecessors(2).unwrap().iter().copied().collect::<Vec<_>>(), vec![0]);
    assert!(req.immediate_predecessors(0).unwrap().is_empty());
    let problem = Problem::new(preset_network(Preset::Topology10, 1).unwrap(), catalog, vec![req]).unwrap();
    let weights = ObjectiveWeights::new(0.5).unwrap();
    for k in 0..10 {
        let p = random_placement(&problem, k);
        let (proc, comm, cost) = naive_request(&problem, &p, 0);
        let rep = problem.evaluate(&p, &weights, PenaltyScale(1.0)).unwrap();
        assert!(rel_close(rep.makespan_sum, proc + comm, 1e-12));
        assert!(rel_close(rep.cost_sum, cost, 1e-12));
    }
}

#[test]
fn report_sums_match_per_request_values() {
    let problem = workload_problem(15, 2);
    let weights = ObjectiveWeights::normalized(0.3, 2.0, 500.0).unwrap();
    let p = random_placement(&problem, 3);
    let rep = problem.evaluate(&p, &weights, PenaltyScale(1.0)).unwrap();
    let naive: Vec<_> = (0..15).map(|r| naive_request(&problem, &p, r)).collect();
    let ms: f64 = naive.iter().map(|x| x.0 + x.1).sum();
    let cs: f64 = naive.iter().map(|x| x.2).sum();
    assert!(rel_close(rep.makespan_sum, ms, 1e-12));
    assert!(rel_close(rep.cost_sum, cs, 1e-12));
    let objective = 0.3 * ms / 2.0 + 0.7 * (cs + rep.deployment_cost()) / 500.0;
    assert!(rel_close(rep.objective, objective, 1e-12));
    assert!(rep.fitness >= rep.objective);
    assert_eq!(rep.feasible(), rep.penalty == 0.0);
}

fn random_tree(rng: &mut rand_chacha::ChaCha8Rng, next: &mut usize, depth: usize) -> fogplace::vnffg::GraphNode {
    use fogplace::vnffg::GraphNode as G;
    use rand::Rng;
    if depth == 0 || *next >= 8 || rng.random_bool(0.3) {
        *next += 1;
        return G::leaf(*next - 1);
    }
    let k = rng.random_range(2..=3);
    let children: Vec<_> = (0..k).map(|_| random_tree(rng, next, depth - 1)).collect();
    match rng.random_range(0..4) {
        0 => G::seq(children),
        1 => G::par(children),
        2 => {
            let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let s: f64 = w.iter().sum();
            G::sel(children, w.iter().map(|x| x / s).collect())
        }
        _ => G::looped(children, rng.random_range(0.0..0.9)),
    }
}

#[test]
fn loops_and_selections_match_recursion() {
    use fogplace::vnffg::{build_request, IotLink};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
    let catalog = VnfCatalog::new(
        (0..12)
            .map(|id| VnfType {
                id,
                resource_req: 1.0,
                capacity: 1e9,
                license_cost: 10.0,
                util_threshold: 1.0,
                instance_count: 2,
            })
            .collect(),
    )
    .unwrap();
    let net = preset_network(Preset::Topology10, 3).unwrap();
    let users = net.users().len();
    let mut requests = Vec::new();
    while requests.len() < 40 {
        let mut next = 0;
        let root = random_tree(&mut rng, &mut next, 3);
        if root.is_leaf() {
            continue;
        }
        let leaves = root.leaves();
        let traffic = leaves.iter().map(|&t| (t, rng.random_range(100.0..80e3))).collect();
        let iot = vec![IotLink {
            user: rng.random_range(0..users),
            vnf: leaves[0],
            traffic: 5e3,
        }];
        requests.push(build_request(requests.len(), root, traffic, iot, &catalog).unwrap());
    }
    let problem = Problem::new(net, catalog, requests).unwrap();
    for k in 0..10 {
        let p = random_placement(&problem, k);
        for r in 0..problem.requests().len() {
            let (proc, comm, cost) = naive_request(&problem, &p, r);
            let m = problem.request_metrics(&p, r).unwrap();
            assert!(rel_close(m.makespan(), proc + comm, 1e-12));
            assert!(rel_close(m.comm_cost, cost, 1e-12));
            let req = problem.request(r);
            for &t in req.required_types() {
                assert_eq!(req.immediate_predecessors(t).unwrap(), &predecessors(req.root(), t));
            }
        }
    }
}
