//! Makespan, cost, constraints and penalized fitness of a placement.

mod constraints;
mod metrics;
mod placement;
mod problem;
mod report;

pub use constraints::{ConstraintKind, Subject, Violation};
pub use metrics::{aggregate, Block, Metrics};
pub use placement::{Assignment, Placement};
pub use problem::Problem;
pub use report::{
    objective, EvaluationReport, ObjectiveParts, ObjectiveWeights, PenaltyScale, ReportRecord,
    PENALTY_EPSILON,
};
