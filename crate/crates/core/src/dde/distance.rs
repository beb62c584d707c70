use super::{time_tol, NormPolicy, Trajectory};
use crate::{Error, Result};

/// Sampling used to approximate `sup_{gamma <= s <= t} ‖a(s) − b(s)‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupConfig {
    /// Each interval of the merged mesh is split into this many equal parts.
    pub refinement: usize,
}

impl Default for SupConfig {
    fn default() -> Self {
        SupConfig { refinement: 8 }
    }
}

/// The sup-history distance `v(t)` with the default sampling.
pub fn sup_distance(a: &Trajectory, b: &Trajectory, t: f64) -> Result<f64> {
    sup_distance_with(a, b, t, &SupConfig::default())
}

pub fn sup_distance_with(a: &Trajectory, b: &Trajectory, t: f64, cfg: &SupConfig) -> Result<f64> {
    Ok(sup_distance_curve(a, b, &[t], cfg)?[0])
}

/// `v` at each of the nondecreasing `times`, sharing one pass over the samples.
///
/// The result is a running maximum over a fixed sample set, so it is nondecreasing.
pub fn sup_distance_curve(
    a: &Trajectory,
    b: &Trajectory,
    times: &[f64],
    cfg: &SupConfig,
) -> Result<Vec<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::Contract(format!(
            "trajectories have dimensions {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let gamma = a.gamma();
    if (gamma - b.gamma()).abs() > time_tol(gamma) {
        return Err(Error::Contract(format!(
            "trajectories start at different times {} and {}",
            gamma,
            b.gamma()
        )));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Contract(
            "sup-distance query times must be nondecreasing".into(),
        ));
    }
    let Some(&t_max) = times.last() else {
        return Ok(Vec::new());
    };
    let front = a.front().min(b.front());
    if t_max > front + time_tol(front) || times[0] < gamma - time_tol(gamma) {
        return Err(Error::Domain {
            t: if t_max > front { t_max } else { times[0] },
            lo: gamma,
            hi: front,
        });
    }

    let mut nodes: Vec<f64> = a
        .mesh()
        .iter()
        .chain(b.mesh())
        .copied()
        .filter(|&s| s <= t_max)
        .collect();
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    let r = cfg.refinement.max(1);
    let mut samples = Vec::with_capacity(nodes.len() * r + times.len());
    for w in nodes.windows(2) {
        for k in 0..r {
            samples.push(w[0] + (w[1] - w[0]) * k as f64 / r as f64);
        }
    }
    samples.extend(nodes.last());
    samples.extend(times.iter().map(|&t| t.clamp(gamma, front)));
    samples.sort_by(f64::total_cmp);
    samples.dedup();

    let n = a.dim();
    let (mut xa, mut xb) = (vec![0.0; n], vec![0.0; n]);
    let mut out = Vec::with_capacity(times.len());
    let mut running = 0.0_f64;
    let mut next = 0;
    for &s in &samples {
        a.eval_into(s, &mut xa)?;
        b.eval_into(s, &mut xb)?;
        running = running.max(NormPolicy::distance(&xa, &xb));
        while next < times.len() && times[next].clamp(gamma, front) <= s {
            out.push(running);
            next += 1;
        }
    }
    debug_assert_eq!(out.len(), times.len());
    Ok(out)
}
