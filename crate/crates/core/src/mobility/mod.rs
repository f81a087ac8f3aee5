//! Random-waypoint stationary location analysis, expectations over node
//! locations, and a trajectory simulator for cross-checking.

mod density;
mod quadrature;
mod simulate;

pub use density::{
    location_density, pause_probability, rwp_core_density, rwp_mobility_density, InitDist,
    LocationDensity, MobilityProfile, Point, EXPECTED_TRAJECTORY_LENGTH,
};
pub use quadrature::{
    expected_pair_metric, expected_user_metric, Basis, Component, DiscreteMeasure, DEFAULT_GRID,
    MASS_TOLERANCE,
};
pub use simulate::{cell_masses, histogram, simulate_rwp, RwpSamples, SAMPLES_PER_LEG, WARM_UP_FRACTION};
