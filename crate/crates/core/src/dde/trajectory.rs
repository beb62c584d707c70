use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::time_tol;
use crate::expr::{EvalError, EvalErrorKind};
use crate::functions::{VecFn, VectorFn};
use crate::{Error, Result};

/// Where the per-node derivatives of a trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivSource {
    /// Produced alongside the values (solver output, or derivative columns in a file).
    Stored,
    /// Estimated from the values by finite differences.
    FiniteDifference,
}

/// A dense solution on `[gamma, front]`: node values and derivatives joined by cubic
/// Hermite segments.
///
/// When an initial function is attached, evaluation on `[gamma, t0]` returns it directly
/// instead of interpolating.
#[derive(Clone)]
pub struct Trajectory {
    dim: usize,
    mesh: Vec<f64>,
    values: Vec<f64>,
    derivs: Vec<f64>,
    t0_index: usize,
    history: Option<VecFn>,
    deriv_source: DerivSource,
}

impl std::fmt::Debug for Trajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Trajectory")
            .field("dim", &self.dim)
            .field("nodes", &self.mesh.len())
            .field("gamma", &self.gamma())
            .field("t0", &self.t0())
            .field("front", &self.front())
            .field("deriv_source", &self.deriv_source)
            .finish_non_exhaustive()
    }
}

/// Cubic Hermite interpolation on one segment.
#[inline]
pub(crate) fn hermite(
    a: f64,
    b: f64,
    ya: &[f64],
    da: &[f64],
    yb: &[f64],
    db: &[f64],
    t: f64,
    out: &mut [f64],
) {
    let h = b - a;
    let s = (t - a) / h;
    let s2 = s * s;
    let r = 1.0 - s;
    let h10 = s * r * r * h;
    let h01 = s2 * (3.0 - 2.0 * s);
    let h11 = s2 * (s - 1.0) * h;
    for k in 0..out.len() {
        out[k] = ya[k] + h01 * (yb[k] - ya[k]) + h10 * da[k] + h11 * db[k];
    }
}

impl Trajectory {
    /// Builds a trajectory from node data. `t0_index` marks the node at which the
    /// history segment ends.
    pub fn new(
        dim: usize,
        mesh: Vec<f64>,
        values: Vec<f64>,
        derivs: Vec<f64>,
        t0_index: usize,
    ) -> Result<Self> {
        Self::validate(dim, &mesh, &values, t0_index)?;
        if derivs.len() != values.len() {
            return Err(Error::Contract(format!(
                "trajectory has {} values but {} derivatives",
                values.len(),
                derivs.len()
            )));
        }
        Ok(Trajectory {
            dim,
            mesh,
            values,
            derivs,
            t0_index,
            history: None,
            deriv_source: DerivSource::Stored,
        })
    }

    /// Builds a trajectory from values only, estimating derivatives with three-point
    /// finite differences. The history part and the solution part are differenced
    /// separately so the kink at `t0` is not smeared.
    pub fn from_samples(
        dim: usize,
        mesh: Vec<f64>,
        values: Vec<f64>,
        t0_index: usize,
    ) -> Result<Self> {
        Self::validate(dim, &mesh, &values, t0_index)?;
        let mut derivs = vec![0.0; values.len()];
        let n = mesh.len();
        finite_differences(
            dim,
            &mesh[..=t0_index],
            &values[..(t0_index + 1) * dim],
            &mut derivs[..(t0_index + 1) * dim],
        );
        if t0_index + 1 < n {
            let mut forward = vec![0.0; (n - t0_index) * dim];
            finite_differences(
                dim,
                &mesh[t0_index..],
                &values[t0_index * dim..],
                &mut forward,
            );
            derivs[t0_index * dim..].copy_from_slice(&forward);
        }
        Ok(Trajectory {
            dim,
            mesh,
            values,
            derivs,
            t0_index,
            history: None,
            deriv_source: DerivSource::FiniteDifference,
        })
    }

    fn validate(dim: usize, mesh: &[f64], values: &[f64], t0_index: usize) -> Result<()> {
        if dim == 0 || mesh.is_empty() {
            return Err(Error::Contract(
                "trajectory needs at least one node and dimension".into(),
            ));
        }
        if values.len() != mesh.len() * dim {
            return Err(Error::Contract(format!(
                "trajectory has {} nodes but {} values for dimension {dim}",
                mesh.len(),
                values.len()
            )));
        }
        if t0_index >= mesh.len() {
            return Err(Error::Contract("t0 index beyond the mesh".into()));
        }
        if let Some(w) = mesh.windows(2).find(|w| !(w[0] < w[1])) {
            return Err(Error::Contract(format!(
                "trajectory mesh is not strictly increasing near t = {}",
                w[0]
            )));
        }
        Ok(())
    }

    /// Starts an empty trajectory for incremental construction by the solvers.
    pub(crate) fn start(dim: usize, history: Option<VecFn>) -> Self {
        Trajectory {
            dim,
            mesh: Vec::new(),
            values: Vec::new(),
            derivs: Vec::new(),
            t0_index: 0,
            history,
            deriv_source: DerivSource::Stored,
        }
    }

    pub(crate) fn push(&mut self, t: f64, x: &[f64], dx: &[f64]) {
        debug_assert!(self.mesh.last().is_none_or(|&last| last < t));
        self.mesh.push(t);
        self.values.extend_from_slice(x);
        self.derivs.extend_from_slice(dx);
    }

    pub(crate) fn mark_t0(&mut self) {
        self.t0_index = self.mesh.len() - 1;
    }

    pub(crate) fn set_deriv(&mut self, i: usize, dx: &[f64]) {
        self.derivs[i * self.dim..(i + 1) * self.dim].copy_from_slice(dx);
    }

    /// Attaches the initial function used for evaluation on `[gamma, t0]`.
    pub fn with_history(mut self, history: VecFn) -> Self {
        self.history = Some(history);
        self
    }

    pub fn history(&self) -> Option<&VecFn> {
        self.history.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mesh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mesh.is_empty()
    }

    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    pub fn gamma(&self) -> f64 {
        self.mesh[0]
    }

    pub fn t0(&self) -> f64 {
        self.mesh[self.t0_index]
    }

    pub fn t0_index(&self) -> usize {
        self.t0_index
    }

    pub fn front(&self) -> f64 {
        *self.mesh.last().expect("non-empty trajectory")
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn deriv_source(&self) -> DerivSource {
        self.deriv_source
    }

    /// Dense evaluation at `t` in `[gamma, front]`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let (lo, hi) = (self.gamma(), self.front());
        let tol = time_tol(hi.abs().max(lo.abs()));
        if !(t >= lo - tol && t <= hi + tol) {
            return Err(Error::Domain { t, lo, hi });
        }
        let t = t.clamp(lo, hi);
        if let Some(h) = &self.history {
            if t <= self.t0() {
                return h.eval_into(t, out).map_err(|e| with_time(e, t));
            }
        }
        let n = self.mesh.len();
        if n == 1 {
            out.copy_from_slice(self.value(0));
            return Ok(());
        }
        let idx = self.mesh.partition_point(|&m| m <= t);
        if idx > 0 && self.mesh[idx - 1] == t {
            out.copy_from_slice(self.value(idx - 1));
            return Ok(());
        }
        let i = (idx.max(1) - 1).min(n - 2);
        hermite(
            self.mesh[i],
            self.mesh[i + 1],
            self.value(i),
            self.deriv(i),
            self.value(i + 1),
            self.deriv(i + 1),
            t,
            out,
        );
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// The scalar trajectory of component `c` (0-based).
    pub fn component(&self, c: usize) -> Result<Trajectory> {
        if c >= self.dim {
            return Err(Error::Contract(format!(
                "component {} requested from a {}-dimensional trajectory",
                c + 1,
                self.dim
            )));
        }
        let pick = |v: &[f64]| {
            v.iter()
                .skip(c)
                .step_by(self.dim)
                .copied()
                .collect::<Vec<_>>()
        };
        Ok(Trajectory {
            dim: 1,
            mesh: self.mesh.clone(),
            values: pick(&self.values),
            derivs: pick(&self.derivs),
            t0_index: self.t0_index,
            history: self.history.as_ref().map(|h| {
                Arc::new(Projection {
                    inner: h.clone(),
                    component: c,
                }) as VecFn
            }),
            deriv_source: self.deriv_source,
        })
    }
}

/// A trajectory used as an initial function; arguments are clamped into its range.
impl VectorFn for Trajectory {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) -> std::result::Result<(), EvalError> {
        match Trajectory::eval_into(self, t.clamp(self.gamma(), self.front()), out) {
            Ok(()) => Ok(()),
            Err(Error::Eval(e)) => Err(e),
            Err(_) => Err(EvalError {
                kind: EvalErrorKind::NonFinite(f64::NAN),
                pos: Default::default(),
                t: Some(t),
            }),
        }
    }
}

fn with_time(mut e: EvalError, t: f64) -> Error {
    e.t.get_or_insert(t);
    Error::Eval(e)
}

struct Projection {
    inner: VecFn,
    component: usize,
}

impl VectorFn for Projection {
    fn dim(&self) -> usize {
        1
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) -> std::result::Result<(), EvalError> {
        let mut full = vec![0.0; self.inner.dim()];
        self.inner.eval_into(t, &mut full)?;
        out[0] = full[self.component];
        Ok(())
    }
}

/// Three-point finite differences on a possibly non-uniform mesh.
fn finite_differences(dim: usize, mesh: &[f64], values: &[f64], out: &mut [f64]) {
    let n = mesh.len();
    let y = |i: usize, k: usize| values[i * dim + k];
    if n < 2 {
        return;
    }
    if n == 2 {
        let h = mesh[1] - mesh[0];
        for k in 0..dim {
            let d = (y(1, k) - y(0, k)) / h;
            out[k] = d;
            out[dim + k] = d;
        }
        return;
    }
    for i in 0..n {
        let c = i.clamp(1, n - 2);
        let (h1, h2) = (mesh[c] - mesh[c - 1], mesh[c + 1] - mesh[c]);
        let (w0, w1, w2) = if i == 0 {
            (
                -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                (h1 + h2) / (h1 * h2),
                -h1 / (h2 * (h1 + h2)),
            )
        } else if i == n - 1 {
            (
                h2 / (h1 * (h1 + h2)),
                -(h1 + h2) / (h1 * h2),
                (2.0 * h2 + h1) / (h2 * (h1 + h2)),
            )
        } else {
            (
                -h2 / (h1 * (h1 + h2)),
                (h2 - h1) / (h1 * h2),
                h1 / (h2 * (h1 + h2)),
            )
        };
        for k in 0..dim {
            out[i * dim + k] = w0 * y(c - 1, k) + w1 * y(c, k) + w2 * y(c + 1, k);
        }
    }
}

/// Evaluates `traj` at `t`; on `[gamma, t0]` this is the initial function when one is attached.
pub fn eval_history(traj: &Trajectory, t: f64) -> Result<Vec<f64>> {
    traj.eval(t)
}
