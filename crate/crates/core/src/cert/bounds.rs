//! Closed-form deviation bounds.
//!
//! ```text
//! perturbation:  ‖θ − θ̃‖ exp(∫_{t0}^t (h + k))
//! dependence:    ‖θ − θ̃‖ exp(∫_{t0}^t k)
//! stability:     ε (t − t0) exp(∫_{t0}^t k)
//! ```

use std::sync::Arc;

use crate::expr::EvalError;
use crate::functions::{constant, ScalarFn, SumFn, TimeFunction};
use crate::gronwall::{cumulative_h, cumulative_h_curve, BoundInputs};
use crate::{Error, Result};

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(Error::Contract(format!(
            "{name} must be finite and nonnegative, got {v}"
        )));
    }
    Ok(())
}

/// `h + k`, or NaN where either part is negative so the integrator rejects it.
struct ModulusSum(SumFn);

impl TimeFunction for ModulusSum {
    fn eval(&self, t: f64) -> std::result::Result<f64, EvalError> {
        let (h, k) = (self.0 .0.eval(t)?, self.0 .1.eval(t)?);
        Ok(if h >= 0.0 && k >= 0.0 {
            h + k
        } else {
            f64::NAN
        })
    }

    fn describe(&self) -> String {
        self.0.describe()
    }
}

fn modulus(h: &ScalarFn, k: &ScalarFn) -> ScalarFn {
    Arc::new(ModulusSum(SumFn(h.clone(), k.clone())))
}

fn integral(f: ScalarFn, t0: f64, t: f64) -> Result<f64> {
    cumulative_h(&BoundInputs::new(constant(0.0), f, t0), t)
}

fn integral_curve(f: ScalarFn, t0: f64, times: &[f64]) -> Result<Vec<f64>> {
    cumulative_h_curve(&BoundInputs::new(constant(0.0), f, t0), times)
}

pub fn perturbation_bound(
    theta_dist: f64,
    h: &ScalarFn,
    k: &ScalarFn,
    t0: f64,
    t: f64,
) -> Result<f64> {
    nonnegative("theta distance", theta_dist)?;
    Ok(theta_dist * integral(modulus(h, k), t0, t)?.exp())
}

pub fn dependence_bound(theta_dist: f64, k: &ScalarFn, t0: f64, t: f64) -> Result<f64> {
    perturbation_bound(theta_dist, &constant(0.0), k, t0, t)
}

pub fn stability_bound(eps: f64, k: &ScalarFn, t0: f64, t: f64) -> Result<f64> {
    nonnegative("eps", eps)?;
    Ok(eps * ((t - t0) * integral(k.clone(), t0, t)?.exp()))
}

/// [`perturbation_bound`] on nondecreasing `times`.
pub fn perturbation_curve(
    theta_dist: f64,
    h: &ScalarFn,
    k: &ScalarFn,
    t0: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    nonnegative("theta distance", theta_dist)?;
    Ok(integral_curve(modulus(h, k), t0, times)?
        .into_iter()
        .map(|big| theta_dist * big.exp())
        .collect())
}

pub fn dependence_curve(theta_dist: f64, k: &ScalarFn, t0: f64, times: &[f64]) -> Result<Vec<f64>> {
    perturbation_curve(theta_dist, &constant(0.0), k, t0, times)
}

pub fn stability_curve(eps: f64, k: &ScalarFn, t0: f64, times: &[f64]) -> Result<Vec<f64>> {
    nonnegative("eps", eps)?;
    Ok(integral_curve(k.clone(), t0, times)?
        .into_iter()
        .zip(times)
        .map(|(big, &t)| eps * ((t - t0) * big.exp()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::time_fn;
    use crate::gronwall::gronwall_bound_ac;
    use std::f64::consts::E;

    #[test]
    fn perturbation_examples() {
        let (zero, one) = (constant(0.0), constant(1.0));
        assert_eq!(perturbation_bound(0.0, &one, &one, 0.0, 3.0).unwrap(), 0.0);
        assert!(
            (perturbation_bound(0.25, &zero, &one, 0.0, 1.0).unwrap() - 0.25 * E).abs() < 1e-14
        );
        assert!((perturbation_bound(1.0, &one, &one, 0.0, 1.0).unwrap() - E * E).abs() < 1e-13);
        assert!(perturbation_bound(1.0, &constant(-1.0), &one, 0.0, 1.0).is_err());
        assert!(perturbation_bound(-1.0, &one, &one, 0.0, 1.0).is_err());
    }

    #[test]
    fn dependence_examples() {
        assert_eq!(
            dependence_bound(0.3, &constant(0.0), 0.0, 5.0).unwrap(),
            0.3
        );
        assert!(
            (dependence_bound(0.1, &constant(1.0), 0.0, 2.0).unwrap() - 0.1 * E * E).abs() < 1e-14
        );
        let k = time_fn(|s| s);
        for t in [0.5, 1.0, 2.0] {
            let closed = (t * t / 2.0f64).exp();
            assert!((dependence_bound(1.0, &k, 0.0, t).unwrap() - closed).abs() < 1e-12 * closed);
        }
    }

    #[test]
    fn stability_examples() {
        let one = constant(1.0);
        assert_eq!(stability_bound(0.0, &one, 0.0, 2.0).unwrap(), 0.0);
        assert!((stability_bound(0.5, &constant(0.0), 1.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((stability_bound(0.01, &one, 0.0, 2.0).unwrap() - 0.02 * E * E).abs() < 1e-15);
        assert_eq!(stability_bound(0.01, &one, 0.0, 0.0).unwrap(), 0.0);
        assert!(stability_bound(-0.01, &one, 0.0, 1.0).is_err());
    }

    #[test]
    fn curves_match_pointwise_values() {
        let k = time_fn(|s| 1.0 + s.sin().abs());
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1).collect();
        let curve = stability_curve(0.01, &k, 0.0, &times).unwrap();
        for (&t, c) in times.iter().zip(&curve) {
            let p = stability_bound(0.01, &k, 0.0, t).unwrap();
            assert!((p - c).abs() <= 1e-10 * (1.0 + p));
        }
    }

    #[test]
    fn homogeneity_and_nesting() {
        let k = time_fn(|s| 0.5 + s);
        let times: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let a = stability_curve(0.02, &k, 0.0, &times).unwrap();
        let b = stability_curve(0.01, &k, 0.0, &times).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x / 2.0, *y);
        }
        let c = 3.7;
        let d1 = dependence_curve(0.1 * c, &k, 0.0, &times).unwrap();
        let d2 = dependence_curve(0.1, &k, 0.0, &times).unwrap();
        for (x, y) in d1.iter().zip(&d2) {
            assert!((x - c * y).abs() <= 1e-15 * x.abs());
        }
        let p = perturbation_curve(0.1, &constant(0.0), &k, 0.0, &times).unwrap();
        assert_eq!(p, d2);
    }

    #[test]
    fn stability_dominates_the_gronwall_envelope() {
        let eps = 0.01;
        let k = constant(1.0);
        let b =
            BoundInputs::new(time_fn(move |s| eps * s), k.clone(), 0.0).with_g_prime(constant(eps));
        for i in 0..=20 {
            let t = i as f64 * 0.1;
            let envelope = gronwall_bound_ac(&b, t).unwrap().value;
            assert!(stability_bound(eps, &k, 0.0, t).unwrap() >= envelope - 1e-15);
        }
    }
}
