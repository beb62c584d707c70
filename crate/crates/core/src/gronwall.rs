//! Gronwall-type envelopes for `v(t) <= g(t) + ∫_{t0}^t h(s) v(s) ds`.
//!
//! With `H(t) = ∫_{t0}^t h`, two upper envelopes are provided:
//!
//! ```text
//! plain:  g(t) + ∫_{t0}^t g(s) h(s) exp(H(t) - H(s)) ds
//! ac:     exp(H(t)) (g(t0) + ∫_{t0}^t g'(s) exp(-H(s)) ds)      (g absolutely continuous)
//! ```
//!
//! Both equal the extremal solution of `v = g + ∫ h v`, which [`extremal_v`] computes
//! independently. [`gronwall_bound_ac_plus_exp`] evaluates the variant with `exp(+H(s))`
//! inside the integral; it coincides with the others for constant `g` but undershoots the
//! extremal solution when `g` decreases, so it is kept only for comparison.

use serde::Serialize;

use crate::functions::ScalarFn;
use crate::{Error, Result};

pub const DEFAULT_INTERVALS: usize = 256;
const RICHARDSON_TOLERANCE: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 4;

#[derive(Clone)]
pub struct BoundInputs {
    pub g: ScalarFn,
    pub g_prime: Option<ScalarFn>,
    pub h: ScalarFn,
    pub t0: f64,
    /// Starting number of Simpson intervals on `[t0, t]`.
    pub intervals: usize,
}

impl std::fmt::Debug for BoundInputs {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundInputs")
            .field("g", &self.g.describe())
            .field("g_prime", &self.g_prime.as_ref().map(|g| g.describe()))
            .field("h", &self.h.describe())
            .field("t0", &self.t0)
            .field("intervals", &self.intervals)
            .finish()
    }
}

impl BoundInputs {
    pub fn new(g: ScalarFn, h: ScalarFn, t0: f64) -> Self {
        BoundInputs {
            g,
            g_prime: None,
            h,
            t0,
            intervals: DEFAULT_INTERVALS,
        }
    }

    pub fn with_g_prime(mut self, g_prime: ScalarFn) -> Self {
        self.g_prime = Some(g_prime);
        self
    }

    pub fn with_intervals(mut self, intervals: usize) -> Self {
        self.intervals = intervals;
        self
    }

    fn h_at(&self, s: f64) -> Result<f64> {
        let v = self.h.eval(s)?;
        if !(v >= 0.0) {
            return Err(Error::Contract(format!(
                "kernel h is negative at s = {s} (h = {v})"
            )));
        }
        Ok(v)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= self.t0) || !t.is_finite() {
            return Err(Error::Contract(format!(
                "bound requested at t = {t} before t0 = {}",
                self.t0
            )));
        }
        if self.intervals == 0 {
            return Err(Error::Contract(
                "need at least one quadrature interval".into(),
            ));
        }
        Ok(())
    }

    /// Checks `g(t0) + ∫_{t0}^t g' = g(t)` and returns the mismatch.
    pub fn check_g_prime(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let gp = self
            .g_prime
            .as_ref()
            .ok_or_else(|| Error::Contract("g' was not supplied".into()))?;
        let integral = refine(self.intervals, |n| {
            simpson(self.t0, t, n, |s| Ok(gp.eval(s)?))
        })?;
        let g0 = self.g.eval(self.t0)?;
        let gt = self.g.eval(t)?;
        let mismatch = (g0 + integral.value - gt).abs();
        if mismatch > 1e-6 * (1.0 + gt.abs()) {
            return Err(Error::Contract(format!(
                "g' is inconsistent with g on [{}, {t}]: g(t0) + ∫g' = {} but g(t) = {gt}",
                self.t0,
                g0 + integral.value
            )));
        }
        Ok(mismatch)
    }
}

/// A quadrature result with its refinement outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundValue {
    pub value: f64,
    /// The last two refinement levels agreed to the relative tolerance.
    pub converged: bool,
    pub intervals: usize,
}

fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let n = n + n % 2;
    if b == a {
        return Ok(0.0);
    }
    let dx = (b - a) / n as f64;
    let mut acc = f(a)? + f(b)?;
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + dx * i as f64)?;
    }
    Ok(acc * dx / 3.0)
}

/// Doubles the interval count until successive values agree, then Richardson-extrapolates.
fn refine(start: usize, mut eval: impl FnMut(usize) -> Result<f64>) -> Result<BoundValue> {
    let mut n = start.max(2);
    let mut coarse = eval(n)?;
    for _ in 0..MAX_REFINEMENTS {
        let fine = eval(2 * n)?;
        n *= 2;
        let diff = fine - coarse;
        if diff.abs() <= RICHARDSON_TOLERANCE * fine.abs() || diff.abs() <= 1e-300 {
            return Ok(BoundValue {
                value: fine + diff / 15.0,
                converged: true,
                intervals: n,
            });
        }
        coarse = fine;
    }
    Ok(BoundValue {
        value: coarse,
        converged: false,
        intervals: n,
    })
}

/// `H` at the nodes of a uniform `n`-interval mesh on `[t0, t]`, one Simpson panel per interval.
fn h_nodes(b: &BoundInputs, t: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let dx = (t - b.t0) / n as f64;
    let nodes: Vec<f64> = (0..=n)
        .map(|i| if i == n { t } else { b.t0 + dx * i as f64 })
        .collect();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    let mut left = b.h_at(nodes[0])?;
    for w in nodes.windows(2) {
        let mid = b.h_at(0.5 * (w[0] + w[1]))?;
        let right = b.h_at(w[1])?;
        let last = *cum.last().unwrap();
        cum.push(last + (w[1] - w[0]) / 6.0 * (left + 4.0 * mid + right));
        left = right;
    }
    Ok((nodes, cum))
}

fn simpson_on_nodes(nodes: &[f64], vals: &[f64]) -> f64 {
    let n = nodes.len() - 1;
    if n == 0 {
        return 0.0;
    }
    let dx = (nodes[n] - nodes[0]) / n as f64;
    let mut acc = vals[0] + vals[n];
    for i in 1..n {
        acc += if i % 2 == 1 { 4.0 } else { 2.0 } * vals[i];
    }
    acc * dx / 3.0
}

/// `H(t) = ∫_{t0}^t h(s) ds` by composite Simpson.
pub fn cumulative_h(b: &BoundInputs, t: f64) -> Result<f64> {
    b.check_time(t)?;
    Ok(refine(b.intervals, |n| simpson(b.t0, t, n, |s| b.h_at(s)))?.value)
}

/// `H` at each of the nondecreasing `times` (all `>= t0`), accumulated interval by interval.
pub fn cumulative_h_curve(b: &BoundInputs, times: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    let mut prev = b.t0;
    for &t in times {
        b.check_time(t)?;
        if t < prev {
            return Err(Error::Contract("curve times must be nondecreasing".into()));
        }
        if t > prev {
            acc += simpson(prev, t, 8, |s| b.h_at(s))?;
        }
        out.push(acc);
        prev = t;
    }
    Ok(out)
}

/// The plain envelope `g(t) + ∫ g h exp(H(t) - H(s)) ds`.
pub fn gronwall_bound(b: &BoundInputs, t: f64) -> Result<BoundValue> {
    b.check_time(t)?;
    let gt = b.g.eval(t)?;
    let integral = refine(b.intervals, |n| {
        let n = n + n % 2;
        let (nodes, cum) = h_nodes(b, t, n)?;
        let ht = cum[n];
        let vals = nodes
            .iter()
            .zip(&cum)
            .map(|(&s, &hs)| Ok(b.g.eval(s)? * b.h_at(s)? * (ht - hs).exp()))
            .collect::<Result<Vec<_>>>()?;
        Ok(simpson_on_nodes(&nodes, &vals))
    })?;
    Ok(BoundValue {
        value: gt + integral.value,
        ..integral
    })
}

fn ac_form(b: &BoundInputs, t: f64, sign: f64) -> Result<BoundValue> {
    b.check_time(t)?;
    b.check_g_prime(t)?;
    let gp = b.g_prime.as_ref().expect("checked above");
    let g0 = b.g.eval(b.t0)?;
    let mut ht = 0.0;
    let integral = refine(b.intervals, |n| {
        let n = n + n % 2;
        let (nodes, cum) = h_nodes(b, t, n)?;
        ht = cum[n];
        let vals = nodes
            .iter()
            .zip(&cum)
            .map(|(&s, &hs)| Ok(gp.eval(s)? * (sign * hs).exp()))
            .collect::<Result<Vec<_>>>()?;
        Ok(simpson_on_nodes(&nodes, &vals))
    })?;
    Ok(BoundValue {
        value: ht.exp() * (g0 + integral.value),
        ..integral
    })
}

/// The absolutely continuous envelope `exp(H(t)) (g(t0) + ∫ g' exp(-H(s)) ds)`.
pub fn gronwall_bound_ac(b: &BoundInputs, t: f64) -> Result<BoundValue> {
    ac_form(b, t, -1.0)
}

/// `exp(H(t)) (g(t0) + ∫ g' exp(+H(s)) ds)`, for comparison only (see the module docs).
pub fn gronwall_bound_ac_plus_exp(b: &BoundInputs, t: f64) -> Result<BoundValue> {
    ac_form(b, t, 1.0)
}

/// The extremal solution of `v = g + ∫_{t0}^t h v` at the points of `mesh`.
///
/// Integrates `w' = h (g + w)`, `w(t0) = 0` with RK4 and returns `g + w`. Each mesh
/// interval is subdivided so no RK step exceeds `(mesh end - t0) / b.intervals`.
pub fn extremal_v(b: &BoundInputs, mesh: &[f64]) -> Result<Vec<f64>> {
    let Some(&end) = mesh.last() else {
        return Ok(Vec::new());
    };
    if (mesh[0] - b.t0).abs() > 1e-12 * b.t0.abs().max(1.0) {
        return Err(Error::Contract(format!(
            "mesh starts at {} instead of t0 = {}",
            mesh[0], b.t0
        )));
    }
    if mesh.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Contract(
            "extremal mesh must be nondecreasing".into(),
        ));
    }
    b.check_time(end)?;
    let max_step = (end - b.t0) / b.intervals as f64;
    let rhs = |s: f64, w: f64| -> Result<f64> { Ok(b.h_at(s)? * (b.g.eval(s)? + w)) };
    let mut w = 0.0;
    let mut out = Vec::with_capacity(mesh.len());
    out.push(b.g.eval(mesh[0])?);
    for win in mesh.windows(2) {
        let len = win[1] - win[0];
        if len > 0.0 {
            let pieces = (len / max_step).ceil().max(1.0) as usize;
            let dt = len / pieces as f64;
            for k in 0..pieces {
                let s = win[0] + dt * k as f64;
                let k1 = rhs(s, w)?;
                let k2 = rhs(s + dt / 2.0, w + dt / 2.0 * k1)?;
                let k3 = rhs(s + dt / 2.0, w + dt / 2.0 * k2)?;
                let k4 = rhs(s + dt, w + dt * k3)?;
                w += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        out.push(b.g.eval(win[1])? + w);
    }
    Ok(out)
}
