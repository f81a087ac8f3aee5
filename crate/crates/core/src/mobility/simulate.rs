//! Monte Carlo random-waypoint simulator, used to cross-check the analytic
//! stationary density.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use super::density::{InitDist, LocationDensity, MobilityProfile, Point};

/// Fraction of the simulated time dropped before sampling.
pub const WARM_UP_FRACTION: f64 = 0.2;

/// Location samples per average leg travel time.
pub const SAMPLES_PER_LEG: f64 = 8.0;

/// Weighted location samples of a simulated node.
#[derive(Debug, Clone, PartialEq)]
pub struct RwpSamples {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Mean leg length over the legs kept after warm-up.
    pub mean_trajectory_length: f64,
    pub legs: usize,
}

impl RwpSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

struct Leg {
    from: Point,
    to: Point,
    start: f64,
    travel: f64,
    pause: f64,
}

/// Simulates `n_trajectories` legs of the random-waypoint process and samples
/// the position on a fixed time step after warm-up. Static behavior enters
/// through sample weights: the mobile samples share `1 - p_static`, the
/// initial distribution carries `p_static`.
pub fn simulate_rwp(profile: &MobilityProfile, n_trajectories: usize, seed: u64) -> RwpSamples {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_trajectories = n_trajectories.max(1);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut mean_len = f64::NAN;
    let mut kept_legs = 0;

    if profile.p_static < 1.0 {
        let legs = simulate_legs(profile, n_trajectories, &mut rng);
        let end = legs.last().map(|l| l.start + l.travel + l.pause).unwrap_or(0.0);
        let cut = WARM_UP_FRACTION * end;
        let step = super::density::EXPECTED_TRAJECTORY_LENGTH / profile.velocity / SAMPLES_PER_LEG;

        let mut len_sum = 0.0;
        let mut t = cut + 0.5 * step;
        let mut mobile = Vec::new();
        for leg in legs.iter().filter(|l| l.start + l.travel + l.pause > cut) {
            if leg.start >= cut {
                len_sum += leg.from.distance(leg.to);
                kept_legs += 1;
            }
            let arrive = leg.start + leg.travel;
            let leave = arrive + leg.pause;
            while t < leave {
                if t < arrive {
                    let s = (t - leg.start) / leg.travel;
                    mobile.push(Point::new(
                        leg.from.x + s * (leg.to.x - leg.from.x),
                        leg.from.y + s * (leg.to.y - leg.from.y),
                    ));
                } else {
                    mobile.push(leg.to);
                }
                t += step;
            }
        }
        if kept_legs > 0 {
            mean_len = len_sum / kept_legs as f64;
        }
        let w = (1.0 - profile.p_static) / mobile.len().max(1) as f64;
        weights.extend(std::iter::repeat_n(w, mobile.len()));
        points.extend(mobile);
    }

    if profile.p_static > 0.0 {
        match profile.init {
            InitDist::Point(p) => {
                points.push(p);
                weights.push(profile.p_static);
            }
            InitDist::Uniform => {
                let n = points.len().max(n_trajectories);
                let w = profile.p_static / n as f64;
                for _ in 0..n {
                    points.push(Point::new(rng.random(), rng.random()));
                    weights.push(w);
                }
            }
        }
    }

    RwpSamples {
        points,
        weights,
        mean_trajectory_length: mean_len,
        legs: kept_legs,
    }
}

fn simulate_legs(profile: &MobilityProfile, n: usize, rng: &mut ChaCha8Rng) -> Vec<Leg> {
    let pause = (profile.expected_pause > 0.0)
        .then(|| Exp::new(1.0 / profile.expected_pause).expect("positive rate"));
    let mut at = match profile.init {
        InitDist::Point(p) => p,
        InitDist::Uniform => Point::new(rng.random(), rng.random()),
    };
    let mut t = 0.0;
    let mut legs = Vec::with_capacity(n);
    for _ in 0..n {
        let to = Point::new(rng.random(), rng.random());
        let travel = at.distance(to) / profile.velocity;
        let ps = pause.as_ref().map(|d| d.sample(rng)).unwrap_or(0.0);
        legs.push(Leg {
            from: at,
            to,
            start: t,
            travel,
            pause: ps,
        });
        t += travel + ps;
        at = to;
    }
    legs
}

/// Mass per cell of a `bins x bins` histogram, row-major with `x` as the
/// column index.
pub fn histogram(samples: &RwpSamples, bins: usize) -> Vec<f64> {
    let mut cells = vec![0.0; bins * bins];
    let cell = |v: f64| ((v * bins as f64) as usize).min(bins - 1);
    for (p, w) in samples.points.iter().zip(&samples.weights) {
        cells[cell(p.y) * bins + cell(p.x)] += w;
    }
    cells
}

/// Analytic mass per histogram cell: the continuous part integrated with a
/// `sub x sub` midpoint rule inside each cell, atoms added to their cell.
pub fn cell_masses(density: &LocationDensity, bins: usize, sub: usize) -> Vec<f64> {
    let mut cells = vec![0.0; bins * bins];
    let h = 1.0 / (bins * sub) as f64;
    for row in 0..bins {
        for col in 0..bins {
            let mut m = 0.0;
            for i in 0..sub {
                for j in 0..sub {
                    let x = ((col * sub + i) as f64 + 0.5) * h;
                    let y = ((row * sub + j) as f64 + 0.5) * h;
                    m += density.density_at(x, y);
                }
            }
            cells[row * bins + col] = m * h * h;
        }
    }
    let cell = |v: f64| ((v * bins as f64) as usize).min(bins - 1);
    for &(p, w) in density.atoms() {
        cells[cell(p.y) * bins + cell(p.x)] += w;
    }
    cells
}
