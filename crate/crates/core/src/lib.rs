//! Delay differential systems with multiple time-dependent lags.
//!
//! The crate solves problems of the form
//!
//! ```text
//! x'(t) = f(t, x(g_1(t)), ..., x(g_m(t)))   t in [t0, T]
//! x(t)  = theta(t)                          t in [gamma, t0]
//! ```
//!
//! by the method of steps, cross-checks the result against a Picard iteration on the
//! equivalent integral equation, and evaluates Gronwall-type deviation bounds
//! (perturbation, continuous dependence, Hyers–Ulam stability) together with
//! certificates that compare those bounds to measured deviations.
//!
//! Problems can be assembled in code from closures or read from JSON problem files whose
//! right-hand sides are written in a small arithmetic language (see [`expr`]).

pub mod cert;
pub mod dde;
mod error;
pub mod expr;
pub mod functions;
pub mod gronwall;
pub mod harness;
pub mod integrator;
pub mod reduction;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::cert::{
        certify_dependence, certify_perturbation, certify_stability, dependence_bound,
        manufacture_approximation, perturbation_bound, residual, stability_bound, Certificate,
        CertificateKind, ResidualReport, Verdict,
    };
    pub use crate::dde::{
        apply_f, eval_history, sup_distance, DelayedProblem, HistoryFunctional, NormPolicy,
        ProblemBuilder, Trajectory,
    };
    pub use crate::expr::{parse, DomainBox, EvalEnv, Expr};
    pub use crate::functions::{
        constant, time_fn, vector_fn, Field, ScalarFn, TimeFunction, VecFn, VectorField, VectorFn,
    };
    pub use crate::gronwall::{
        cumulative_h, extremal_v, gronwall_bound, gronwall_bound_ac, BoundInputs,
    };
    pub use crate::integrator::{
        convergence_order, picard_solve, solve, GridConfig, PicardConfig, Solution,
    };
    pub use crate::reduction::{extract_first, reduce, HigherOrderProblem};
    pub use crate::{Error, Result};
}
