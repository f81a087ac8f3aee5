//! Weighted objective, penalties and the evaluation report.

use serde::{Deserialize, Serialize};

use super::constraints::Violation;
use super::placement::Placement;
use super::problem::Problem;
use crate::error::{Error, Result};

/// Smallest right-hand side used when scaling a penalty.
pub const PENALTY_EPSILON: f64 = 1e-9;

/// Trade-off between makespan and cost, with optional normalizers that
/// divide each side before weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveWeights {
    pub alpha: f64,
    pub makespan_scale: f64,
    pub cost_scale: f64,
}

impl ObjectiveWeights {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::normalized(alpha, 1.0, 1.0)
    }

    pub fn normalized(alpha: f64, makespan_scale: f64, cost_scale: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("alpha {alpha} outside [0, 1]")));
        }
        if !(makespan_scale > 0.0 && cost_scale > 0.0) {
            return Err(Error::Domain("normalizers must be > 0".into()));
        }
        Ok(Self {
            alpha,
            makespan_scale,
            cost_scale,
        })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        Self::normalized(alpha, self.makespan_scale, self.cost_scale)
    }
}

/// Sums entering the objective.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ObjectiveParts {
    pub makespan: f64,
    pub comm_cost: f64,
    pub deployment_cost: f64,
}

/// `alpha * M + (1 - alpha) * (C + C_dep)`, each side divided by its
/// normalizer.
pub fn objective(parts: &ObjectiveParts, weights: &ObjectiveWeights) -> Result<f64> {
    let a = weights.alpha;
    if !(0.0..=1.0).contains(&a) {
        return Err(Error::Domain(format!("alpha {a} outside [0, 1]")));
    }
    Ok(a * parts.makespan / weights.makespan_scale
        + (1.0 - a) * (parts.comm_cost + parts.deployment_cost) / weights.cost_scale)
}

/// Objective value that penalty coefficients are expressed in, fixed for a
/// whole solver run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyScale(pub f64);

impl PenaltyScale {
    /// Coefficient of one violated constraint instance.
    pub fn coefficient(&self, v: &Violation) -> f64 {
        if v.kind.is_capacity() {
            self.0 / v.rhs.max(PENALTY_EPSILON)
        } else {
            self.0
        }
    }

    /// `sum zeta * max(0, g - b)`.
    pub fn penalty<'a>(&self, violations: impl IntoIterator<Item = &'a Violation>) -> f64 {
        violations
            .into_iter()
            .map(|v| self.coefficient(v) * v.excess())
            .sum()
    }
}

/// Full evaluation of one placement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub makespans: Vec<f64>,
    pub costs: Vec<f64>,
    pub makespan_sum: f64,
    pub cost_sum: f64,
    pub license_cost: f64,
    pub hosting_cost: f64,
    pub objective: f64,
    pub violations: Vec<Violation>,
    pub penalty: f64,
    pub fitness: f64,
}

impl EvaluationReport {
    pub fn feasible(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn deployment_cost(&self) -> f64 {
        self.license_cost + self.hosting_cost
    }

    pub fn record(&self) -> ReportRecord {
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        ReportRecord {
            makespan_sum: self.makespan_sum,
            cost_sum: self.cost_sum,
            license_cost: self.license_cost,
            hosting_cost: self.hosting_cost,
            objective: self.objective,
            penalty: self.penalty,
            fitness: self.fitness,
            feasible: self.feasible(),
            violations: self.violations.len(),
            violated: self
                .violations
                .iter()
                .map(|v| v.kind.name())
                .collect::<Vec<_>>()
                .join(";"),
            makespans: join(&self.makespans),
            costs: join(&self.costs),
        }
    }
}

/// Flat CSV form of an [`EvaluationReport`]; per-request values are joined
/// with `;`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub makespan_sum: f64,
    pub cost_sum: f64,
    pub license_cost: f64,
    pub hosting_cost: f64,
    pub objective: f64,
    pub penalty: f64,
    pub fitness: f64,
    pub feasible: bool,
    pub violations: usize,
    pub violated: String,
    pub makespans: String,
    pub costs: String,
}

impl Problem {
    /// Objective sums of `p`.
    pub fn objective_parts(&self, p: &Placement) -> Result<ObjectiveParts> {
        let mut parts = ObjectiveParts::default();
        for r in 0..self.requests().len() {
            let m = self.request_metrics(p, r)?;
            parts.makespan += m.makespan();
            parts.comm_cost += m.comm_cost;
        }
        let (lic, hst) = self.deployment_cost(p);
        parts.deployment_cost = lic + hst;
        Ok(parts)
    }

    /// Objective of `p`, ignoring constraints.
    pub fn objective(&self, p: &Placement, weights: &ObjectiveWeights) -> Result<f64> {
        objective(&self.objective_parts(p)?, weights)
    }

    /// Objective plus penalty, without building a report.
    pub fn fitness(&self, p: &Placement, weights: &ObjectiveWeights, scale: PenaltyScale) -> Result<f64> {
        let obj = self.objective(p, weights)?;
        let mut penalty = 0.0;
        self.visit_violations(p, |v| penalty += scale.coefficient(&v) * v.excess());
        Ok(obj + penalty)
    }

    /// Complete report of `p`.
    pub fn evaluate(
        &self,
        p: &Placement,
        weights: &ObjectiveWeights,
        scale: PenaltyScale,
    ) -> Result<EvaluationReport> {
        let n = self.requests().len();
        let mut makespans = Vec::with_capacity(n);
        let mut costs = Vec::with_capacity(n);
        for r in 0..n {
            let m = self.request_metrics(p, r)?;
            makespans.push(m.makespan());
            costs.push(m.comm_cost);
        }
        let (license_cost, hosting_cost) = self.deployment_cost(p);
        let parts = ObjectiveParts {
            makespan: makespans.iter().sum(),
            comm_cost: costs.iter().sum(),
            deployment_cost: license_cost + hosting_cost,
        };
        let obj = objective(&parts, weights)?;
        let violations = self.check_constraints(p);
        let penalty = scale.penalty(&violations);
        Ok(EvaluationReport {
            makespan_sum: parts.makespan,
            cost_sum: parts.comm_cost,
            makespans,
            costs,
            license_cost,
            hosting_cost,
            objective: obj,
            violations,
            penalty,
            fitness: obj + penalty,
        })
    }
}
