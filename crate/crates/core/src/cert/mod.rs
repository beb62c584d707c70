//! Deviation bounds, residuals and certificates comparing them with measured deviations.

mod bounds;
mod certificate;
mod residual;

pub use bounds::{
    dependence_bound, dependence_curve, perturbation_bound, perturbation_curve, stability_bound,
    stability_curve,
};
pub use certificate::{
    certify_dependence, certify_perturbation, certify_stability, manufacture_approximation,
    Certificate, CertificateKind, InputsDigest, ModulusDigest, Verdict, MARGIN_SLACK,
    RESIDUAL_SLACK,
};
pub use residual::{residual, ResidualReport};
