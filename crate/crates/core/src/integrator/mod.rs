//! Method of steps with classical RK4, plus a Picard oracle on the integral form.
//!
//! Delayed arguments are read from the accepted dense output. An argument that falls
//! inside the step being taken (a vanishing or short lag) makes the step implicit; it is
//! resolved by fixed-point iteration on the end-of-step value and derivative, halving the
//! step when the iteration does not settle.

mod config;
mod mesh;
mod order;
mod picard;
mod steps;

pub use config::GridConfig;
pub use mesh::breaking_points;
pub use order::{convergence_order, OrderEstimate};
pub use picard::{
    picard_solve, picard_solve_functional, InitialIterate, PicardConfig, PicardReport,
    PicardSolution,
};
pub use steps::{
    solve, solve_functional, solve_perturbed, stage_defect, Solution, SolveInfo, StageRecord,
};
