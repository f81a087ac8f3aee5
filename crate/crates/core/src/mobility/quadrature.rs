//! Expectations over node locations by tensor-product midpoint quadrature.
//!
//! A [`LocationDensity`] is a mixture of point atoms, the uniform density and
//! the mobility density. Every expectation splits along that mixture: atoms
//! are evaluated at their point, continuous parts on a `G x G` midpoint grid.

use std::ops::{Add, Mul};

use super::density::{rwp_mobility_density, LocationDensity, Point};
use crate::error::{Error, Result};

pub const DEFAULT_GRID: usize = 24;

/// Largest tolerated deviation of the raw midpoint mass of the mobility
/// density from 1 before the grid is deemed too coarse.
pub const MASS_TOLERANCE: f64 = 0.05;

/// Continuous building blocks of a location density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    Uniform,
    Mobile,
}

/// A mixture component: an atom or a continuous basis density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    Atom(Point),
    Continuous(Basis),
}

impl LocationDensity {
    /// Nonzero mixture components with their weights.
    pub fn components(&self) -> Vec<(Component, f64)> {
        let mut out: Vec<(Component, f64)> = self
            .atoms()
            .iter()
            .filter(|a| a.1 > 0.0)
            .map(|&(p, w)| (Component::Atom(p), w))
            .collect();
        if self.uniform_weight() > 0.0 {
            out.push((Component::Continuous(Basis::Uniform), self.uniform_weight()));
        }
        if self.mobile_weight() > 0.0 {
            out.push((Component::Continuous(Basis::Mobile), self.mobile_weight()));
        }
        out
    }
}

/// Finitely supported probability measure.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn atom(p: Point) -> Self {
        Self {
            points: vec![p],
            weights: vec![1.0],
        }
    }

    /// Midpoint grid of a basis density, weights normalized to one.
    pub fn basis(basis: Basis, grid: usize) -> Result<Self> {
        if grid == 0 {
            return Err(Error::Quadrature("grid size must be >= 1".into()));
        }
        let h = 1.0 / grid as f64;
        let mut points = Vec::with_capacity(grid * grid);
        let mut weights = Vec::with_capacity(grid * grid);
        for i in 0..grid {
            for j in 0..grid {
                let p = Point::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                let w = match basis {
                    Basis::Uniform => h * h,
                    Basis::Mobile => rwp_mobility_density(p.x, p.y) * h * h,
                };
                points.push(p);
                weights.push(w);
            }
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Quadrature(format!(
                "{basis:?} density integrates to {mass} on a {grid}x{grid} grid"
            )));
        }
        weights.iter_mut().for_each(|w| *w /= mass);
        Ok(Self { points, weights })
    }

    /// Full discretization of a location density.
    pub fn from_density(density: &LocationDensity, grid: usize) -> Result<Self> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (component, w) in density.components() {
            match component {
                Component::Atom(p) => {
                    points.push(p);
                    weights.push(w);
                }
                Component::Continuous(basis) => {
                    let m = Self::basis(basis, grid)?;
                    points.extend(m.points);
                    weights.extend(m.weights.into_iter().map(|x| x * w));
                }
            }
        }
        Ok(Self { points, weights })
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum_i w_i f(p_i)`.
    pub fn expect<T>(&self, f: impl Fn(Point) -> T) -> T
    where
        T: Default + Add<Output = T> + Mul<f64, Output = T>,
    {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&p, &w)| acc + f(p) * w)
    }

    /// `sum_i sum_j v_i w_j f(p_i, q_j)`.
    pub fn expect_pair<T>(&self, other: &DiscreteMeasure, f: impl Fn(Point, Point) -> T) -> T
    where
        T: Default + Add<Output = T> + Mul<f64, Output = T>,
    {
        self.points
            .iter()
            .zip(&self.weights)
            .fold(T::default(), |acc, (&p, &wp)| {
                acc + other.expect(|q| f(p, q)) * wp
            })
    }
}

/// Expected value of `metric(X, Y)` with `X` drawn from `density_n` and `Y`
/// from `density_m`, independently.
pub fn expected_pair_metric(
    density_n: &LocationDensity,
    density_m: &LocationDensity,
    grid: usize,
    metric: impl Fn(Point, Point) -> f64,
) -> Result<f64> {
    let a = DiscreteMeasure::from_density(density_n, grid)?;
    let b = DiscreteMeasure::from_density(density_m, grid)?;
    Ok(a.expect_pair(&b, metric))
}

/// Expected value of `metric(X, user)` with `X` drawn from `density_n`.
pub fn expected_user_metric(
    density_n: &LocationDensity,
    user: Point,
    grid: usize,
    metric: impl Fn(Point, Point) -> f64,
) -> Result<f64> {
    let a = DiscreteMeasure::from_density(density_n, grid)?;
    Ok(a.expect(|p| metric(p, user)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::density::{InitDist, MobilityProfile};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(a: Point, b: Point) -> f64 {
        a.distance(b)
    }

    #[test]
    fn point_masses_reduce_to_evaluation() {
        let x0 = Point::new(0.1, 0.2);
        let y0 = Point::new(0.7, 0.9);
        let a = LocationDensity::point_mass(x0);
        let b = LocationDensity::point_mass(y0);
        assert_eq!(expected_pair_metric(&a, &b, 24, dist).unwrap(), dist(x0, y0));
        assert_eq!(expected_user_metric(&a, y0, 24, dist).unwrap(), dist(x0, y0));
    }

    #[test]
    fn constants_integrate_exactly() {
        let p = MobilityProfile::new(0.3, 0.1, 2.0, InitDist::Point(Point::new(0.4, 0.4))).unwrap();
        let d = LocationDensity::from_profile(&p);
        let u = LocationDensity::uniform();
        let v = expected_pair_metric(&d, &u, 16, |_, _| 3.5).unwrap();
        assert_relative_eq!(v, 3.5, epsilon = 1e-12);
        let v = expected_user_metric(&d, Point::new(0.0, 0.0), 16, |_, _| 3.5).unwrap();
        assert_relative_eq!(v, 3.5, epsilon = 1e-12);
    }

    #[test]
    fn uniform_expected_distance() {
        let u = LocationDensity::uniform();
        let v = expected_pair_metric(&u, &u, 24, dist).unwrap();
        // Monte Carlo cross-check of the mean distance between uniform points.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 400_000;
        let mc: f64 = (0..n)
            .map(|_| {
                let a = Point::new(rng.random(), rng.random());
                let b = Point::new(rng.random(), rng.random());
                dist(a, b)
            })
            .sum::<f64>()
            / n as f64;
        assert!((v - 0.5214).abs() < 5e-3, "{v}");
        assert!((mc - 0.5214).abs() < 2e-3, "{mc}");
    }

    #[test]
    fn uniform_distance_to_corner() {
        let u = LocationDensity::uniform();
        let v = expected_user_metric(&u, Point::new(0.0, 0.0), 24, dist).unwrap();
        let exact = (2f64.sqrt() + (1.0 + 2f64.sqrt()).ln()) / 3.0;
        assert_relative_eq!(exact, 0.7652, epsilon = 1e-4);
        assert!((v - exact).abs() < 1e-3, "{v}");
    }

    #[test]
    fn coarse_grids_rejected() {
        assert!(matches!(DiscreteMeasure::basis(Basis::Mobile, 0), Err(Error::Quadrature(_))));
        assert!(matches!(DiscreteMeasure::basis(Basis::Mobile, 2), Err(Error::Quadrature(_))));
        assert!(DiscreteMeasure::basis(Basis::Mobile, 24).is_ok());
    }

    #[test]
    fn linear_and_monotone_in_the_metric() {
        let p = MobilityProfile::new(0.0, 1.0, 0.5, InitDist::Uniform).unwrap();
        let d = LocationDensity::from_profile(&p);
        let u = LocationDensity::point_mass(Point::new(0.9, 0.1));
        let e1 = expected_pair_metric(&d, &u, 12, dist).unwrap();
        let e2 = expected_pair_metric(&d, &u, 12, |a, b| a.x * b.y + 1.0).unwrap();
        let both = expected_pair_metric(&d, &u, 12, |a, b| 2.0 * dist(a, b) - 3.0 * (a.x * b.y + 1.0))
            .unwrap();
        assert_relative_eq!(both, 2.0 * e1 - 3.0 * e2, epsilon = 1e-12);
        let bigger = expected_pair_metric(&d, &u, 12, |a, b| dist(a, b) + a.x * a.x).unwrap();
        assert!(bigger >= e1);
    }
}
