use serde::Serialize;

use super::{solve, GridConfig};
use crate::dde::{sup_distance, DelayedProblem, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct OrderEstimate {
    /// Least-squares slope of `log(error)` against `log(step)`; `None` when some error is
    /// exactly zero.
    pub order: Option<f64>,
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Errors did not decrease strictly with the step, or the order is indeterminate.
    pub low_confidence: bool,
}

/// Solves with each step and measures the sup-history distance to `reference` at `T`.
pub fn convergence_order(
    problem: &DelayedProblem,
    steps: &[f64],
    reference: &Trajectory,
    template: &GridConfig,
) -> Result<OrderEstimate> {
    if steps.len() < 3 {
        return Err(Error::Contract(format!(
            "order estimation needs at least 3 step sizes, got {}",
            steps.len()
        )));
    }
    let mut steps = steps.to_vec();
    steps.sort_by(|a, b| b.total_cmp(a));
    let errors = steps
        .iter()
        .map(|&h| {
            let sol = solve(
                problem,
                &GridConfig {
                    step: h,
                    ..*template
                },
            )?;
            sup_distance(&sol.trajectory, reference, problem.horizon())
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = errors.windows(2).all(|w| w[1] < w[0]);
    let order = if errors.contains(&0.0) {
        None
    } else {
        let xs: Vec<f64> = steps.iter().map(|h| h.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        Some(slope(&xs, &ys))
    };
    Ok(OrderEstimate {
        low_confidence: !monotone || order.is_none(),
        order,
        steps,
        errors,
    })
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
