use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected distance between two uniform points of the unit square, as used
/// by the pause-probability formula.
pub const EXPECTED_TRAJECTORY_LENGTH: f64 = 0.52;

/// A location in the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn in_unit_square(self) -> bool {
        (0.0..=1.0).contains(&self.x) && (0.0..=1.0).contains(&self.y)
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point { x, y }
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Where a node starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitDist {
    Point(Point),
    Uniform,
}

/// Random-waypoint parameters of one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobilityProfile {
    /// Probability that the node never moves.
    pub p_static: f64,
    /// Region units per second.
    pub velocity: f64,
    /// Mean pause at each waypoint, seconds.
    pub expected_pause: f64,
    pub init: InitDist,
}

impl MobilityProfile {
    /// A node that never leaves `at`.
    pub fn fixed(at: Point) -> Self {
        Self {
            p_static: 1.0,
            velocity: 0.0,
            expected_pause: 0.0,
            init: InitDist::Point(at),
        }
    }

    pub fn new(p_static: f64, velocity: f64, expected_pause: f64, init: InitDist) -> Result<Self> {
        let p = Self {
            p_static,
            velocity,
            expected_pause,
            init,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_static) {
            return Err(Error::schema("mobility.p_static", "must lie in [0, 1]"));
        }
        if self.p_static < 1.0 && !(self.velocity > 0.0 && self.velocity.is_finite()) {
            return Err(Error::schema("mobility.velocity", "must be > 0 for a mobile node"));
        }
        if !(self.expected_pause >= 0.0 && self.expected_pause.is_finite()) {
            return Err(Error::schema("mobility.expected_pause", "must be >= 0"));
        }
        if let InitDist::Point(p) = self.init {
            if !p.in_unit_square() {
                return Err(Error::schema("mobility.init", "point outside [0,1]^2"));
            }
        }
        Ok(())
    }

    pub fn is_static(&self) -> bool {
        self.p_static >= 1.0
    }

    /// The same node assumed never to move from its initial distribution.
    pub fn frozen(&self) -> Self {
        Self {
            p_static: 1.0,
            ..*self
        }
    }
}

/// Fraction of the mobile time spent pausing.
pub fn pause_probability(profile: &MobilityProfile) -> f64 {
    if profile.expected_pause == 0.0 || profile.velocity <= 0.0 {
        return 0.0;
    }
    let travel = EXPECTED_TRAJECTORY_LENGTH / profile.velocity;
    profile.expected_pause / (profile.expected_pause + travel)
}

/// Closed-form mobility density on the fundamental triangle
/// `0 < x <= 0.5, 0 < y <= x`.
pub fn rwp_core_density(x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 0.5 && y > 0.0 && y <= x) {
        return Err(Error::Domain(format!("({x}, {y}) outside the fundamental triangle")));
    }
    Ok(core_unchecked(x, y))
}

fn core_unchecked(x: f64, y: f64) -> f64 {
    let s = 1.0 - 2.0 * x + 2.0 * x * x;
    let rational = 0.75 * s * (y / (y - 1.0) + y * y / ((x - 1.0) * x));
    let log = 1.5
        * y
        * ((2.0 * x - 1.0) * (y + 1.0) * ((1.0 - x) / x).ln() + (s + y) * ((1.0 - y) / y).ln());
    let v = 6.0 * y + rational + log;
    if v.is_finite() {
        v
    } else {
        0.0
    }
}

/// Stationary density of a node that moves without pausing, over the unit
/// square. Zero outside the open square.
pub fn rwp_mobility_density(x: f64, y: f64) -> f64 {
    if !(x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
        return 0.0;
    }
    let (a, b) = if x <= 0.5 {
        if y <= x {
            (x, y)
        } else if y <= 0.5 {
            (y, x)
        } else if y <= 1.0 - x {
            (1.0 - y, x)
        } else {
            (x, 1.0 - y)
        }
    } else if y <= 1.0 - x {
        (1.0 - x, y)
    } else if y <= 0.5 {
        (y, 1.0 - x)
    } else if y <= x {
        (1.0 - y, 1.0 - x)
    } else {
        (1.0 - x, 1.0 - y)
    };
    core_unchecked(a, b)
}

/// Stationary location distribution of one node: point atoms plus a
/// continuous part mixing the uniform and the mobility densities.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationDensity {
    atoms: Vec<(Point, f64)>,
    uniform_weight: f64,
    mobile_weight: f64,
}

impl LocationDensity {
    pub fn from_profile(profile: &MobilityProfile) -> Self {
        let p_st = profile.p_static;
        let p_p = if p_st < 1.0 {
            pause_probability(profile)
        } else {
            0.0
        };
        let mut atoms = Vec::new();
        let mut uniform_weight = (1.0 - p_st) * p_p;
        match profile.init {
            InitDist::Point(p) if p_st > 0.0 => atoms.push((p, p_st)),
            InitDist::Point(_) => {}
            InitDist::Uniform => uniform_weight += p_st,
        }
        Self {
            atoms,
            uniform_weight,
            mobile_weight: (1.0 - p_st) * (1.0 - p_p),
        }
    }

    pub fn point_mass(at: Point) -> Self {
        Self {
            atoms: vec![(at, 1.0)],
            uniform_weight: 0.0,
            mobile_weight: 0.0,
        }
    }

    pub fn uniform() -> Self {
        Self {
            atoms: Vec::new(),
            uniform_weight: 1.0,
            mobile_weight: 0.0,
        }
    }

    pub fn atoms(&self) -> &[(Point, f64)] {
        &self.atoms
    }

    pub fn uniform_weight(&self) -> f64 {
        self.uniform_weight
    }

    pub fn mobile_weight(&self) -> f64 {
        self.mobile_weight
    }

    pub fn continuous_weight(&self) -> f64 {
        self.uniform_weight + self.mobile_weight
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.continuous_weight()
    }

    /// Density of the continuous part at `(x, y)`.
    pub fn density_at(&self, x: f64, y: f64) -> f64 {
        if !((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y)) {
            return 0.0;
        }
        let mut d = self.uniform_weight;
        if self.mobile_weight > 0.0 {
            d += self.mobile_weight * rwp_mobility_density(x, y);
        }
        d
    }
}

/// Continuous part of the stationary density of `profile` at `(x, y)`;
/// point-mass initial locations are carried as atoms by [`LocationDensity`].
pub fn location_density(profile: &MobilityProfile, x: f64, y: f64) -> f64 {
    LocationDensity::from_profile(profile).density_at(x, y)
}
