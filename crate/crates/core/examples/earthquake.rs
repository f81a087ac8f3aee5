//! Scores the earthquake early-warning application on the 10-node topology
//! with every component in the cloud, then with the two sensor-facing
//! components moved to fog nodes.
//!
//! cargo run --example earthquake

use fogplace::evaluator::{ObjectiveWeights, PenaltyScale, Placement, Problem};
use fogplace::infra::{preset_network, Preset, Tier};
use fogplace::units::KB;
use fogplace::vnffg::{earthquake_request, VnfCatalog, VnfType, EARTHQUAKE_COMPONENTS};

fn main() -> fogplace::error::Result<()> {
    let network = preset_network(Preset::Topology10, 4)?;
    let catalog = VnfCatalog::new(
        (0..EARTHQUAKE_COMPONENTS.len())
            .map(|id| VnfType {
                id,
                resource_req: 1.0,
                capacity: 1e9,
                license_cost: 100.0,
                util_threshold: 1.0,
                instance_count: 1,
            })
            .collect(),
    )?;
    let request = earthquake_request(0, 40.0 * KB, &catalog)?;
    let problem = Problem::new(network, catalog, vec![request])?;
    let weights = ObjectiveWeights::new(0.5)?;

    let clouds: Vec<_> = problem.network().ids_of(Tier::Cloud).collect();
    let fogs: Vec<_> = problem.network().ids_of(Tier::Fog).collect();
    let mut p = Placement::empty(problem.catalog(), 1);
    for t in 0..EARTHQUAKE_COMPONENTS.len() {
        p.deploy(t, 0, clouds[t % clouds.len()]);
        p.assign(0, t, 0);
    }
    let report = |p: &Placement, label: &str| -> fogplace::error::Result<()> {
        let r = problem.evaluate(p, &weights, PenaltyScale(1.0))?;
        println!(
            "{label:>10}: makespan {:.4} s, traffic cost {:.6}, deployment {:.2}, feasible {}",
            r.makespan_sum,
            r.cost_sum,
            r.deployment_cost(),
            r.feasible()
        );
        Ok(())
    };
    report(&p, "all cloud")?;

    // EW hears the sensors, VD the responders' devices.
    for (t, n) in [(0, fogs[0]), (4, fogs[1])] {
        p.deploy(t, 0, n);
        p.assign(0, t, 0);
    }
    report(&p, "EW+VD fog")?;
    for (t, name) in EARTHQUAKE_COMPONENTS.iter().enumerate() {
        println!("  {name} on node {}", p.host(t, 0).unwrap());
    }
    Ok(())
}
