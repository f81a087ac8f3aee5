//! Stationary location density of a random-waypoint fog node, checked
//! against a simulated trajectory.
//!
//! cargo run --release --example mobility_density

use fogplace::harness::validate_mobility;
use fogplace::mobility::{location_density, pause_probability, InitDist, MobilityProfile, Point};

fn main() -> fogplace::error::Result<()> {
    let profile = MobilityProfile::new(0.5, 0.01, 20.0, InitDist::Point(Point::new(0.3, 0.7)))?;
    println!("pause probability {:.4}", pause_probability(&profile));
    for (x, y) in [(0.5, 0.5), (0.3, 0.7), (0.05, 0.05)] {
        println!("f({x}, {y}) = {:.4}", location_density(&profile, x, y));
    }

    let uniform = MobilityProfile::new(0.0, 0.01, 0.0, InitDist::Uniform)?;
    let check = validate_mobility(&uniform, 1_000_000, 16, 7)?;
    println!(
        "{} samples: analytic mass {:.5}, L1 cell error {:.4}, mean leg {:.4}",
        check.samples, check.analytic_mass, check.l1_error, check.mean_trajectory_length
    );
    let centre = check.cells.iter().find(|c| c.row == 8 && c.col == 8).unwrap();
    println!("centre cell: analytic {:.5} simulated {:.5}", centre.analytic, centre.empirical);
    Ok(())
}
