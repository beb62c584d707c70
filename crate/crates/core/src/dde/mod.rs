//! Problem definition, trajectories and the quantities built from them.

mod distance;
mod functional;
mod norm;
mod problem;
mod trajectory;

pub use distance::{sup_distance, sup_distance_curve, sup_distance_with, SupConfig};
pub use functional::{apply_f, History, HistoryFunctional};
pub use norm::NormPolicy;
pub use problem::{DelayedProblem, ProblemBuilder, DEFAULT_VALIDATION_SAMPLES};
pub(crate) use trajectory::hermite;
pub use trajectory::{eval_history, DerivSource, Trajectory};

/// Relative slack used when comparing times that should coincide.
pub fn time_tol(t: f64) -> f64 {
    1e-12 * t.abs().max(1.0)
}
