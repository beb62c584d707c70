//! Lowering of scalar `n`-th order delay equations to first-order systems.
//!
//! For `x^(n)(t) = F(t, x(g_1(t)), …, x^(n-1)(g_1(t)), …, x^(n-1)(g_m(t)))` the reduced
//! system in `y = (x, x', …, x^(n-1))` reads
//!
//! ```text
//! y_i' = y_{i+1}(t)   (i < n)
//! y_n' = F(t, y(g_1(t)), …, y(g_m(t)))
//! ```
//!
//! `F` is a one-output [`VectorField`] over `m` blocks of size `n`: symbol `z<j>_<i+1>` is
//! the `i`-th derivative at delay `j`. When no delay is the identity, `g(t) = t` is appended
//! as an extra block for the chain rows.

use std::sync::Arc;

use crate::dde::{time_tol, DelayedProblem, Trajectory};
use crate::expr::{DomainBox, EvalError};
use crate::functions::{Field, ScalarFn, Stacked, TimeFunction, VectorField};
use crate::{Error, Result};

const CONSISTENCY_SAMPLES: usize = 64;
/// Relative tolerance of the finite-difference check on supplied derivatives of `θ`.
pub const DERIVATIVE_TOLERANCE: f64 = 1e-5;

#[derive(Clone)]
pub struct HigherOrderProblem {
    name: String,
    order: usize,
    gamma: f64,
    t0: f64,
    horizon: f64,
    delays: Vec<ScalarFn>,
    rhs: Field,
    /// `θ, θ', …, θ^(n-1)`.
    theta: Vec<ScalarFn>,
    lipschitz: Option<ScalarFn>,
    domain_box: Option<DomainBox>,
}

impl std::fmt::Debug for HigherOrderProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HigherOrderProblem")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("gamma", &self.gamma)
            .field("t0", &self.t0)
            .field("horizon", &self.horizon)
            .field("delays", &self.delays.len())
            .finish_non_exhaustive()
    }
}

impl HigherOrderProblem {
    /// `theta` lists the initial function followed by its first `order - 1` derivatives.
    pub fn new(
        order: usize,
        (gamma, t0, horizon): (f64, f64, f64),
        delays: Vec<ScalarFn>,
        rhs: Field,
        theta: Vec<ScalarFn>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidProblem("order must be at least 1".into()));
        }
        if theta.len() < order {
            return Err(Error::InvalidProblem(format!(
                "order {order} needs theta and {} derivative(s), got {} function(s)",
                order - 1,
                theta.len()
            )));
        }
        if theta.len() > order {
            return Err(Error::InvalidProblem(format!(
                "order {order} takes {order} initial functions, got {}",
                theta.len()
            )));
        }
        if rhs.out_dim() != 1 || rhs.block_dim() != order || rhs.blocks() != delays.len() {
            return Err(Error::InvalidProblem(format!(
                "rhs must map {} blocks of size {order} to a scalar, got {} blocks of size {} to R^{}",
                delays.len(),
                rhs.blocks(),
                rhs.block_dim(),
                rhs.out_dim()
            )));
        }
        if !(gamma <= t0 && t0 < horizon) {
            return Err(Error::InvalidProblem(format!(
                "need gamma <= t0 < T, got gamma = {gamma}, t0 = {t0}, T = {horizon}"
            )));
        }
        let hp = HigherOrderProblem {
            name: "problem".into(),
            order,
            gamma,
            t0,
            horizon,
            delays,
            rhs,
            theta,
            lipschitz: None,
            domain_box: None,
        };
        hp.check_derivatives()?;
        Ok(hp)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Lipschitz modulus of the scalar `F`.
    pub fn with_lipschitz(mut self, k: ScalarFn) -> Self {
        self.lipschitz = Some(k);
        self
    }

    /// Box for the reduced state `(x, …, x^(n-1))`.
    pub fn with_domain_box(mut self, b: DomainBox) -> Result<Self> {
        if b.dim() != self.order {
            return Err(Error::InvalidProblem(format!(
                "domain box has {} components, reduced state has {}",
                b.dim(),
                self.order
            )));
        }
        self.domain_box = Some(b);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Central differences of `θ^(j)` against `θ^(j+1)` on a grid of `[gamma, t0]`.
    fn check_derivatives(&self) -> Result<()> {
        let width = self.t0 - self.gamma;
        if self.order == 1 || width <= 0.0 {
            return Ok(());
        }
        let step = (1e-4 * width.max(1.0)).min(width / 4.0);
        let (lo, hi) = (self.gamma + step, self.t0 - step);
        for j in 0..self.order - 1 {
            let (f, df) = (&self.theta[j], &self.theta[j + 1]);
            for i in 0..CONSISTENCY_SAMPLES {
                let t = lo + (hi - lo) * i as f64 / (CONSISTENCY_SAMPLES - 1) as f64;
                let fd = (f.eval(t + step)? - f.eval(t - step)?) / (2.0 * step);
                let given = df.eval(t)?;
                if (fd - given).abs() > DERIVATIVE_TOLERANCE * (1.0 + given.abs()) {
                    return Err(Error::InvalidProblem(format!(
                        "derivative {} of theta is inconsistent at t = {t}: supplied {given}, finite difference {fd}",
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Index of the first delay equal to `t` on `[t0, T]`, if any. [`reduce`] appends `g(t) = t`
/// as a new last delay when this is `None` and the order exceeds 1.
pub fn identity_delay(hp: &HigherOrderProblem) -> Result<Option<usize>> {
    for (j, g) in hp.delays.iter().enumerate() {
        if is_identity(g, hp.t0, hp.horizon)? {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

fn is_identity(g: &ScalarFn, t0: f64, horizon: f64) -> Result<bool> {
    const N: usize = 257;
    for i in 0..N {
        let t = t0 + (horizon - t0) * i as f64 / (N - 1) as f64;
        if (g.eval(t)? - t).abs() > time_tol(t) {
            return Ok(false);
        }
    }
    Ok(true)
}

struct ChainField {
    inner: Field,
    order: usize,
    blocks: usize,
    identity: usize,
}

impl VectorField for ChainField {
    fn out_dim(&self) -> usize {
        self.order
    }

    fn block_dim(&self) -> usize {
        self.order
    }

    fn blocks(&self) -> usize {
        self.blocks
    }

    fn eval_into(&self, t: f64, z: &[f64], out: &mut [f64]) -> std::result::Result<(), EvalError> {
        let n = self.order;
        let current = &z[self.identity * n..(self.identity + 1) * n];
        out[..n - 1].copy_from_slice(&current[1..]);
        self.inner
            .eval_into(t, &z[..self.inner.blocks() * n], &mut out[n - 1..])
    }
}

/// `max(1, k)`: the chain rows are 1-Lipschitz in the max norm.
struct ChainModulus(ScalarFn);

impl TimeFunction for ChainModulus {
    fn eval(&self, t: f64) -> std::result::Result<f64, EvalError> {
        Ok(self.0.eval(t)?.max(1.0))
    }

    fn describe(&self) -> String {
        format!("max(1, {})", self.0.describe())
    }
}

/// The first-order system for `hp`. Order 1 is passed through unchanged.
pub fn reduce(hp: &HigherOrderProblem) -> Result<DelayedProblem> {
    let n = hp.order;
    let mut b = DelayedProblem::builder(hp.gamma, hp.t0, hp.horizon).name(hp.name.clone());
    if let Some(d) = &hp.domain_box {
        b = b.domain_box(d.clone());
    }
    if n == 1 {
        b = b
            .delays(hp.delays.iter().cloned())
            .rhs(hp.rhs.clone())
            .theta(Arc::new(Stacked(hp.theta.clone())));
        if let Some(k) = &hp.lipschitz {
            b = b.lipschitz(k.clone());
        }
        return b.build();
    }
    let mut delays = hp.delays.clone();
    let identity = match identity_delay(hp)? {
        Some(j) => j,
        None => {
            delays.push(Arc::new(crate::expr::Expr::time()));
            delays.len() - 1
        }
    };
    let field = ChainField {
        inner: hp.rhs.clone(),
        order: n,
        blocks: delays.len(),
        identity,
    };
    b = b
        .delays(delays)
        .rhs(Arc::new(field))
        .theta(Arc::new(Stacked(hp.theta.clone())));
    if let Some(k) = &hp.lipschitz {
        b = b.lipschitz(Arc::new(ChainModulus(k.clone())));
    }
    b.build()
}

/// The `x` component of a reduced solution.
pub fn extract_first(traj: &Trajectory, order: usize) -> Result<Trajectory> {
    if traj.dim() != order {
        return Err(Error::Contract(format!(
            "trajectory has dimension {}, expected order {order}",
            traj.dim()
        )));
    }
    traj.component(0)
}

/// Chain consistency of a reduced solution on `[t0, front]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainReport {
    /// Largest `|D y_i − y_{i+1}|` at step midpoints, `D` the derivative of the dense output.
    pub max_defect: f64,
    /// Estimated interpolation error of the dense output at step midpoints.
    pub interpolation_tolerance: f64,
}

impl ChainReport {
    /// `max_defect <= factor * interpolation_tolerance`.
    pub fn within(&self, factor: f64) -> bool {
        self.max_defect <= factor * self.interpolation_tolerance
    }
}

/// Compares the derivative of each interpolated `y_i` with `y_{i+1}` at every step midpoint.
///
/// The interpolation tolerance is the largest gap between the cubic Hermite midpoint value
/// and the cubic through the four surrounding nodes, floored at the rounding level of a
/// difference quotient on the local step.
pub fn chain_consistency(traj: &Trajectory) -> Result<ChainReport> {
    let n = traj.dim();
    let start = traj.t0_index();
    let mesh = traj.mesh();
    if traj.len() < start + 4 {
        return Err(Error::Contract(
            "chain check needs at least four forward nodes".into(),
        ));
    }
    let scale = (start..traj.len())
        .flat_map(|i| traj.value(i).iter().map(|v| v.abs()))
        .fold(1.0_f64, f64::max);
    let mut max_defect = 0.0_f64;
    let mut tolerance = 0.0_f64;
    let mut mid = vec![0.0; n];
    for i in start..traj.len() - 1 {
        let (a, b) = (mesh[i], mesh[i + 1]);
        let h = b - a;
        if h <= 0.0 {
            continue;
        }
        let m = 0.5 * (a + b);
        traj.eval_into(m, &mut mid)?;
        let (ya, yb, da, db) = (
            traj.value(i),
            traj.value(i + 1),
            traj.deriv(i),
            traj.deriv(i + 1),
        );
        for c in 0..n.saturating_sub(1) {
            let slope = 1.5 * (yb[c] - ya[c]) / h - 0.25 * (da[c] + db[c]);
            max_defect = max_defect.max((slope - mid[c + 1]).abs());
        }
        let first = i.saturating_sub(1).max(start).min(traj.len() - 4);
        let nodes = [first, first + 1, first + 2, first + 3];
        for c in 0..n {
            let mut lagrange = 0.0;
            for &p in &nodes {
                let mut w = 1.0;
                for &q in &nodes {
                    if q != p {
                        w *= (m - mesh[q]) / (mesh[p] - mesh[q]);
                    }
                }
                lagrange += w * traj.value(p)[c];
            }
            tolerance = tolerance.max((lagrange - mid[c]).abs());
        }
        tolerance = tolerance.max(8.0 * f64::EPSILON * scale / h);
    }
    Ok(ChainReport {
        max_defect,
        interpolation_tolerance: tolerance,
    })
}

/// Zero right-hand side of the given order over `blocks` delays.
pub fn zero_rhs(order: usize, blocks: usize) -> Field {
    crate::functions::field_fn_shaped(1, order, blocks, |_, _, out| out[0] = 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::functions::constant;
    use crate::functions::{field_fn_shaped, time_fn, ExprField};
    use crate::integrator::{solve, GridConfig};
    use std::f64::consts::PI;

    fn sin_stack() -> Vec<ScalarFn> {
        vec![time_fn(f64::sin), time_fn(f64::cos)]
    }

    fn harmonic() -> HigherOrderProblem {
        let rhs = ExprField::new(vec![parse("-z1_1").unwrap()], 1, 2).unwrap();
        HigherOrderProblem::new(
            2,
            (-0.1, 0.0, 2.0 * PI),
            vec![time_fn(|t| t)],
            Arc::new(rhs),
            sin_stack(),
        )
        .unwrap()
        .with_lipschitz(constant(1.0))
    }

    #[test]
    fn order_one_is_identity() {
        let rhs = field_fn_shaped(1, 1, 1, |_, z, out| out[0] = -z[0]);
        let hp = HigherOrderProblem::new(
            1,
            (-1.0, 0.0, 2.0),
            vec![time_fn(|t| t - 1.0)],
            rhs.clone(),
            vec![constant(1.0)],
        )
        .unwrap();
        let p = reduce(&hp).unwrap();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.num_delays(), 1);
        assert!(Arc::ptr_eq(p.rhs(), &rhs));
        let x = solve(&p, &GridConfig::with_step(1e-3)).unwrap().trajectory;
        assert!((x.eval(2.0).unwrap()[0] + 0.5).abs() < 1e-10);
    }

    #[test]
    fn harmonic_structure() {
        let p = reduce(&harmonic()).unwrap();
        assert_eq!(p.dim(), 2);
        assert_eq!(p.num_delays(), 1);
        let mut out = [0.0; 2];
        p.rhs().eval_into(0.3, &[0.7, -0.2], &mut out).unwrap();
        assert_eq!(out, [-0.2, -0.7]);
        assert_eq!(
            p.theta_at(-0.05).unwrap(),
            vec![(-0.05f64).sin(), (-0.05f64).cos()]
        );
        assert_eq!(p.lipschitz().unwrap().eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn harmonic_round_trip() {
        let p = reduce(&harmonic()).unwrap();
        let y = solve(&p, &GridConfig::with_step(1e-3)).unwrap().trajectory;
        let x = extract_first(&y, 2).unwrap();
        for i in 0..=200 {
            let t = 2.0 * PI * i as f64 / 200.0;
            assert!((x.eval(t).unwrap()[0] - t.sin()).abs() < 1e-6);
        }
        let chain = chain_consistency(&y).unwrap();
        assert!(chain.within(10.0), "{chain:?}");
    }

    #[test]
    fn delayed_second_order_appends_identity() {
        // sin(t - π) = -sin t, so x = sin solves x'' = x(t - π).
        let rhs = ExprField::new(vec![parse("z1_1").unwrap()], 1, 2).unwrap();
        let hp = HigherOrderProblem::new(
            2,
            (-PI, 0.0, 2.0 * PI),
            vec![time_fn(|t| t - PI)],
            Arc::new(rhs),
            sin_stack(),
        )
        .unwrap();
        let p = reduce(&hp).unwrap();
        assert_eq!(p.num_delays(), 2);
        let y = solve(&p, &GridConfig::with_step(1e-3)).unwrap().trajectory;
        let x = extract_first(&y, 2).unwrap();
        for i in 0..=100 {
            let t = 2.0 * PI * i as f64 / 100.0;
            assert!((x.eval(t).unwrap()[0] - t.sin()).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn zero_system_gives_zero() {
        let hp = HigherOrderProblem::new(
            3,
            (-1.0, 0.0, 1.0),
            vec![time_fn(|t| t)],
            zero_rhs(3, 1),
            vec![constant(0.0); 3],
        )
        .unwrap();
        let y = solve(&reduce(&hp).unwrap(), &GridConfig::with_step(0.05))
            .unwrap()
            .trajectory;
        let x = extract_first(&y, 3).unwrap();
        assert!((0..x.len()).all(|i| x.value(i)[0] == 0.0));
    }

    #[test]
    fn missing_derivatives_rejected() {
        let err = HigherOrderProblem::new(
            2,
            (-0.1, 0.0, 1.0),
            vec![time_fn(|t| t)],
            zero_rhs(2, 1),
            vec![time_fn(f64::sin)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidProblem(_)));
    }

    #[test]
    fn inconsistent_derivative_rejected() {
        let err = HigherOrderProblem::new(
            2,
            (-0.1, 0.0, 1.0),
            vec![time_fn(|t| t)],
            zero_rhs(2, 1),
            vec![time_fn(f64::sin), time_fn(|t| -t.cos())],
        )
        .unwrap_err();
        assert!(err.to_string().contains("derivative 1"), "{err}");
    }

    #[test]
    fn extract_first_dimension_mismatch() {
        let tr = Trajectory::new(1, vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0], 0).unwrap();
        assert!(extract_first(&tr, 2).is_err());
        assert_eq!(extract_first(&tr, 1).unwrap().len(), 2);
    }
}
