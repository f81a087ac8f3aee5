//! Builds a small network from a scenario document and prints the expected
//! link metrics between its nodes.
//!
//! cargo run --example scenario_file

use fogplace::infra::{build_cache, load_scenario};

const SCENARIO: &str = r#"{
  "seed": 11,
  "quadrature_grid": 16,
  "params": { "fog_p_static": 0.25, "user_count": 2 },
  "nodes": [
    { "tier": "cloud", "location": [0.5, 0.5] },
    { "tier": "fog", "location": [0.2, 0.2] },
    { "tier": "fog", "capacity": 3,
      "mobility": { "p_static": 0.0, "velocity": 0.02, "expected_pause": 10,
                    "init": { "point": [0.8, 0.3] } } }
  ],
  "users": [[0.1, 0.1], [0.9, 0.4]]
}"#;

fn main() -> fogplace::error::Result<()> {
    let network = load_scenario(SCENARIO)?;
    for n in network.nodes() {
        println!(
            "node {} {:?}: capacity {}, unit cost {:.2}, p_static {}",
            n.id, n.tier, n.capacity, n.unit_cost, n.mobility.p_static
        );
    }
    let cache = build_cache(&network)?;
    for a in 0..network.len() {
        for b in a + 1..network.len() {
            let e = cache.between(a, b);
            println!(
                "{a}-{b}: E[lat] {:.4} s, E[BW] {:.3e} bit/s, 1 MB takes {:.4} s",
                e.latency,
                e.bandwidth,
                e.delay(1e6)
            );
        }
        for u in 0..network.users().len() {
            println!("{a}->user {u}: 1 KB takes {:.4} s", cache.to_user(a, u).delay(1e3));
        }
    }
    Ok(())
}
