use serde::Serialize;

use crate::dde::{DelayedProblem, DerivSource, HistoryFunctional, NormPolicy, Trajectory};
use crate::{Error, Result};

/// Pointwise defect `‖x'(t) − F(t, x_t)‖` of a trajectory on its nodes in `[t0, front]`.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Maximum of `residuals`.
    pub eps_est: f64,
    /// Time at which the maximum is attained.
    pub worst_t: f64,
    pub deriv_source: DerivSource,
}

/// Uses the trajectory's stored derivatives when it has them and finite differences of its
/// values otherwise.
pub fn residual(traj: &Trajectory, problem: &DelayedProblem) -> Result<ResidualReport> {
    if traj.dim() != problem.dim() {
        return Err(Error::Contract(format!(
            "trajectory has dimension {}, problem has {}",
            traj.dim(),
            problem.dim()
        )));
    }
    if (traj.t0() - problem.t0()).abs() > 1e-9 * problem.t0().abs().max(1.0) {
        return Err(Error::Contract(format!(
            "trajectory marks t0 = {} but the problem has t0 = {}",
            traj.t0(),
            problem.t0()
        )));
    }
    let functional = HistoryFunctional::new(problem);
    let mut times = Vec::new();
    let mut residuals = Vec::new();
    let mut f = vec![0.0; problem.dim()];
    for i in traj.t0_index()..traj.len() {
        let t = traj.mesh()[i];
        functional.apply_into(t, traj, &mut f)?;
        times.push(t);
        residuals.push(NormPolicy::distance(traj.deriv(i), &f));
    }
    let (worst, eps_est) =
        residuals
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, 0.0_f64),
                |acc, (i, r)| if r > acc.1 { (i, r) } else { acc },
            );
    Ok(ResidualReport {
        worst_t: times[worst],
        eps_est,
        times,
        residuals,
        deriv_source: traj.deriv_source(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{field_fn, time_fn, vector_fn};
    use crate::integrator::{solve, GridConfig};

    fn growth() -> DelayedProblem {
        DelayedProblem::builder(0.0, 0.0, 1.0)
            .delay(time_fn(|t| t))
            .rhs(field_fn(1, 1, |_, z, out| out[0] = z[0]))
            .theta(vector_fn(1, |_, out| out[0] = 1.0))
            .build()
            .unwrap()
    }

    #[test]
    fn exact_samples_have_no_residual() {
        let mesh: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
        let values: Vec<f64> = mesh.iter().map(|t| t.exp()).collect();
        let tr = Trajectory::new(1, mesh, values.clone(), values, 0).unwrap();
        let r = residual(&tr, &growth()).unwrap();
        assert!(r.eps_est <= 1e-10, "{}", r.eps_est);
        assert_eq!(r.deriv_source, DerivSource::Stored);
    }

    #[test]
    fn solver_output_residual_is_at_truncation_scale() {
        let p = growth();
        let h = 0.01;
        let sol = solve(&p, &GridConfig::with_step(h)).unwrap();
        let r = residual(&sol.trajectory, &p).unwrap();
        // The stored derivative is F at the accepted state, so the defect is rounding only.
        assert!(r.eps_est <= 10.0 * h.powi(4), "{}", r.eps_est);
    }

    #[test]
    fn injected_drift_is_measured() {
        // x' = 0 with x = 2; the approximation drifts by 0.001 (t - t0).
        let p = DelayedProblem::builder(-1.0, 0.0, 2.0)
            .delay(time_fn(|t| t - 1.0))
            .rhs(field_fn(1, 1, |_, _, out| out[0] = 0.0))
            .theta(vector_fn(1, |_, out| out[0] = 2.0))
            .build()
            .unwrap();
        let mesh: Vec<f64> = (0..=300).map(|i| -1.0 + i as f64 / 100.0).collect();
        let values: Vec<f64> = mesh.iter().map(|&t| 2.0 + 0.001 * t.max(0.0)).collect();
        let tr = Trajectory::from_samples(1, mesh, values, 100).unwrap();
        let r = residual(&tr, &p).unwrap();
        assert_eq!(r.deriv_source, DerivSource::FiniteDifference);
        assert!((r.eps_est - 0.001).abs() < 1e-12, "{}", r.eps_est);
        assert!(r.residuals.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        let tr = Trajectory::new(2, vec![0.0, 1.0], vec![0.0; 4], vec![0.0; 4], 0).unwrap();
        assert!(residual(&tr, &growth()).is_err());
    }
}
