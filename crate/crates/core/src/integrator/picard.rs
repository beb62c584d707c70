//! Successive approximation on `x(t) = theta(t0) + ∫_{t0}^t F(s, x_s) ds`.
//!
//! Independent of the RK machinery: a uniform mesh, trapezoidal cumulative quadrature and
//! linear interpolation for delayed arguments that land past `t0`.

use serde::Serialize;

use super::mesh::history_nodes;
use crate::dde::{DelayedProblem, HistoryFunctional, NormPolicy, Trajectory};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialIterate {
    /// `x_0(t) = theta(t0)` on `[t0, T]`.
    ConstantExtension,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardConfig {
    pub iterations: usize,
    /// Number of quadrature intervals on `[t0, T]`.
    pub intervals: usize,
    pub initial: InitialIterate,
    /// Stop early once successive iterates differ by less than this.
    pub tolerance: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig {
            iterations: 60,
            intervals: 8192,
            initial: InitialIterate::ConstantExtension,
            tolerance: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PicardReport {
    pub iterations: usize,
    /// `sup |x_{k+1} - x_k|` on the mesh, one entry per iteration.
    pub differences: Vec<f64>,
    pub converged: bool,
    /// Set when the differences grew for three consecutive iterations at some point.
    /// Transient growth is normal when `k (T - t0)` is large, so this is informational.
    pub growth_flagged: bool,
}

#[derive(Debug, Clone)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub report: PicardReport,
}

/// How one delayed argument at one mesh node is read.
enum Lookup {
    /// From the initial function; fixed across iterations.
    Fixed(Vec<f64>),
    /// Linear interpolation between nodes `i` and `i + 1` of the current iterate.
    Interp(usize, f64),
}

pub fn picard_solve(problem: &DelayedProblem, cfg: &PicardConfig) -> Result<PicardSolution> {
    picard_solve_functional(&HistoryFunctional::new(problem), cfg)
}

pub fn picard_solve_functional(
    functional: &HistoryFunctional,
    cfg: &PicardConfig,
) -> Result<PicardSolution> {
    if cfg.iterations == 0 || cfg.intervals == 0 {
        return Err(Error::Contract(
            "Picard iteration needs at least one iteration and interval".into(),
        ));
    }
    let p = functional.problem();
    let (gamma, t0, horizon) = (p.gamma(), p.t0(), p.horizon());
    let (n, m) = (p.dim(), p.num_delays());
    let big_n = cfg.intervals;
    let ds = (horizon - t0) / big_n as f64;
    let mesh: Vec<f64> = (0..=big_n)
        .map(|i| {
            if i == big_n {
                horizon
            } else {
                t0 + ds * i as f64
            }
        })
        .collect();

    let mut lookups = Vec::with_capacity(mesh.len() * m);
    let mut times = vec![0.0; m];
    for &s in &mesh {
        functional.delayed_times(s, &mut times)?;
        for &g in &times {
            if g <= t0 {
                lookups.push(Lookup::Fixed(p.theta_at(g)?));
            } else {
                let u = (g - t0) / ds;
                let i = (u.floor() as usize).min(big_n - 1);
                lookups.push(Lookup::Interp(i, u - i as f64));
            }
        }
    }

    let x0 = p.theta_at(t0)?;
    let mut x: Vec<f64> = match cfg.initial {
        InitialIterate::ConstantExtension => x0.repeat(mesh.len()),
    };
    let mut f = vec![0.0; mesh.len() * n];
    let mut z = vec![0.0; m * n];
    let mut report = PicardReport::default();

    let eval_all = |x: &[f64], f: &mut [f64], z: &mut [f64]| -> Result<()> {
        for (i, &s) in mesh.iter().enumerate() {
            for (j, block) in z.chunks_mut(n).enumerate() {
                match &lookups[i * m + j] {
                    Lookup::Fixed(v) => block.copy_from_slice(v),
                    Lookup::Interp(k, w) => {
                        for c in 0..n {
                            block[c] = (1.0 - w) * x[k * n + c] + w * x[(k + 1) * n + c];
                        }
                    }
                }
            }
            functional.eval_at(s, z, &mut f[i * n..(i + 1) * n])?;
        }
        Ok(())
    };

    let mut growth_run = 0;
    let mut next = vec![0.0; x.len()];
    for _ in 0..cfg.iterations {
        eval_all(&x, &mut f, &mut z)?;
        next[..n].copy_from_slice(&x0);
        for i in 1..mesh.len() {
            let h = mesh[i] - mesh[i - 1];
            for c in 0..n {
                next[i * n + c] =
                    next[(i - 1) * n + c] + 0.5 * h * (f[(i - 1) * n + c] + f[i * n + c]);
            }
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Blowup { t: horizon });
        }
        let diff = NormPolicy::distance(&next, &x);
        if report.differences.last().is_some_and(|&prev| diff > prev) {
            growth_run += 1;
            if growth_run >= 3 {
                report.growth_flagged = true;
            }
        } else {
            growth_run = 0;
        }
        report.differences.push(diff);
        report.iterations += 1;
        std::mem::swap(&mut x, &mut next);
        if diff <= cfg.tolerance * (1.0 + NormPolicy::vector(&x)) {
            report.converged = true;
            break;
        }
    }
    eval_all(&x, &mut f, &mut z)?;

    let mut traj = Trajectory::start(n, Some(p.theta().clone()));
    let hist = history_nodes(gamma, t0, ds);
    let zeros = vec![0.0; n];
    for &t in &hist[..hist.len() - 1] {
        traj.push(t, &p.theta_at(t)?, &zeros);
    }
    for (i, &t) in mesh.iter().enumerate() {
        traj.push(t, &x[i * n..(i + 1) * n], &f[i * n..(i + 1) * n]);
        if i == 0 {
            traj.mark_t0();
        }
    }
    Ok(PicardSolution {
        trajectory: traj,
        report,
    })
}
