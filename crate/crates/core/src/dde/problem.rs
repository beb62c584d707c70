use super::time_tol;
use crate::expr::DomainBox;
use crate::functions::{Field, ScalarFn, VecFn};
use crate::{Error, Result};

pub const DEFAULT_VALIDATION_SAMPLES: usize = 1024;

/// A first-order delay problem on `[gamma, T]`.
///
/// Immutable once built; cloning is cheap since all functions are shared.
#[derive(Clone)]
pub struct DelayedProblem {
    name: String,
    gamma: f64,
    t0: f64,
    horizon: f64,
    dim: usize,
    delays: Vec<ScalarFn>,
    rhs: Field,
    theta: VecFn,
    lipschitz: Option<ScalarFn>,
    diff_modulus: Option<ScalarFn>,
    domain_box: Option<DomainBox>,
    constant_lags: Vec<Option<f64>>,
    validation_samples: usize,
}

impl std::fmt::Debug for DelayedProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DelayedProblem")
            .field("name", &self.name)
            .field("gamma", &self.gamma)
            .field("t0", &self.t0)
            .field("horizon", &self.horizon)
            .field("dim", &self.dim)
            .field("delays", &self.delays.len())
            .field("constant_lags", &self.constant_lags)
            .finish_non_exhaustive()
    }
}

impl DelayedProblem {
    pub fn builder(gamma: f64, t0: f64, horizon: f64) -> ProblemBuilder {
        ProblemBuilder {
            name: "problem".into(),
            gamma,
            t0,
            horizon,
            delays: Vec::new(),
            rhs: None,
            theta: None,
            lipschitz: None,
            diff_modulus: None,
            domain_box: None,
            validation_samples: DEFAULT_VALIDATION_SAMPLES,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_delays(&self) -> usize {
        self.delays.len()
    }

    pub fn delays(&self) -> &[ScalarFn] {
        &self.delays
    }

    pub fn rhs(&self) -> &Field {
        &self.rhs
    }

    pub fn theta(&self) -> &VecFn {
        &self.theta
    }

    pub fn lipschitz(&self) -> Option<&ScalarFn> {
        self.lipschitz.as_ref()
    }

    pub fn diff_modulus(&self) -> Option<&ScalarFn> {
        self.diff_modulus.as_ref()
    }

    pub fn domain_box(&self) -> Option<&DomainBox> {
        self.domain_box.as_ref()
    }

    /// `Some(tau)` for every delay of the form `t - tau` (detected on the validation grid).
    pub fn constant_lags(&self) -> &[Option<f64>] {
        &self.constant_lags
    }

    pub fn theta_at(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.theta.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// Rebuilds the problem with another initial function on the same interval.
    pub fn with_theta(&self, theta: VecFn) -> Result<DelayedProblem> {
        self.rebuild(|b| b.theta(theta))
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<DelayedProblem> {
        let mut b = self.to_builder();
        b.horizon = horizon;
        b.build()
    }

    pub fn with_lipschitz(&self, k: Option<ScalarFn>) -> DelayedProblem {
        let mut p = self.clone();
        p.lipschitz = k;
        p
    }

    pub fn with_name(&self, name: impl Into<String>) -> DelayedProblem {
        let mut p = self.clone();
        p.name = name.into();
        p
    }

    fn rebuild(&self, f: impl FnOnce(ProblemBuilder) -> ProblemBuilder) -> Result<DelayedProblem> {
        f(self.to_builder()).build()
    }

    fn to_builder(&self) -> ProblemBuilder {
        ProblemBuilder {
            name: self.name.clone(),
            gamma: self.gamma,
            t0: self.t0,
            horizon: self.horizon,
            delays: self.delays.clone(),
            rhs: Some(self.rhs.clone()),
            theta: Some(self.theta.clone()),
            lipschitz: self.lipschitz.clone(),
            diff_modulus: self.diff_modulus.clone(),
            domain_box: self.domain_box.clone(),
            validation_samples: self.validation_samples,
        }
    }
}

pub struct ProblemBuilder {
    name: String,
    gamma: f64,
    t0: f64,
    horizon: f64,
    delays: Vec<ScalarFn>,
    rhs: Option<Field>,
    theta: Option<VecFn>,
    lipschitz: Option<ScalarFn>,
    diff_modulus: Option<ScalarFn>,
    domain_box: Option<DomainBox>,
    validation_samples: usize,
}

impl ProblemBuilder {
    pub fn name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn delay(mut self, g: ScalarFn) -> Self {
        self.delays.push(g);
        self
    }

    pub fn delays(mut self, gs: impl IntoIterator<Item = ScalarFn>) -> Self {
        self.delays.extend(gs);
        self
    }

    pub fn rhs(mut self, f: Field) -> Self {
        self.rhs = Some(f);
        self
    }

    pub fn theta(mut self, theta: VecFn) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn lipschitz(mut self, k: ScalarFn) -> Self {
        self.lipschitz = Some(k);
        self
    }

    pub fn diff_modulus(mut self, h: ScalarFn) -> Self {
        self.diff_modulus = Some(h);
        self
    }

    pub fn domain_box(mut self, b: DomainBox) -> Self {
        self.domain_box = Some(b);
        self
    }

    pub fn validation_samples(mut self, n: usize) -> Self {
        self.validation_samples = n;
        self
    }

    /// Checks the interval ordering, dimensions, the delay bounds `gamma <= g_j(t) <= t`
    /// and finiteness of `theta`, all on a uniform sample grid.
    pub fn build(self) -> Result<DelayedProblem> {
        let ProblemBuilder {
            name,
            gamma,
            t0,
            horizon,
            delays,
            rhs,
            theta,
            lipschitz,
            diff_modulus,
            domain_box,
            validation_samples,
        } = self;
        if !(gamma.is_finite() && t0.is_finite() && horizon.is_finite()) {
            return Err(Error::InvalidProblem(
                "gamma, t0 and T must be finite".into(),
            ));
        }
        if !(gamma <= t0 && t0 < horizon) {
            return Err(Error::InvalidProblem(format!(
                "need gamma <= t0 < T, got gamma = {gamma}, t0 = {t0}, T = {horizon}"
            )));
        }
        let rhs = rhs.ok_or_else(|| Error::InvalidProblem("missing right-hand side".into()))?;
        let theta =
            theta.ok_or_else(|| Error::InvalidProblem("missing initial function".into()))?;
        if delays.is_empty() {
            return Err(Error::InvalidProblem(
                "at least one delay is required".into(),
            ));
        }
        let dim = rhs.out_dim();
        if dim == 0 || rhs.block_dim() != dim || rhs.blocks() != delays.len() || theta.dim() != dim
        {
            return Err(Error::InvalidProblem(format!(
                "dimension mismatch: rhs maps {} blocks of size {} to R^{}, {} delays, theta in R^{}",
                rhs.blocks(),
                rhs.block_dim(),
                rhs.out_dim(),
                delays.len(),
                theta.dim()
            )));
        }
        if let Some(b) = &domain_box {
            if b.dim() != dim {
                return Err(Error::InvalidProblem(format!(
                    "domain box has {} components, state has {dim}",
                    b.dim()
                )));
            }
        }
        let samples = validation_samples.max(2);

        let grid = |a: f64, b: f64| {
            (0..samples).map(move |i| a + (b - a) * i as f64 / (samples - 1) as f64)
        };

        let mut constant_lags = Vec::with_capacity(delays.len());
        for (j, g) in delays.iter().enumerate() {
            let mut lag_min = f64::INFINITY;
            let mut lag_max = f64::NEG_INFINITY;
            let mut first_lag = 0.0;
            for (i, t) in grid(t0, horizon).enumerate() {
                let value = g.eval(t)?;
                let tol = time_tol(t);
                if !value.is_finite() || value < gamma - tol || value > t + tol {
                    return Err(Error::DelayBound { j: j + 1, t, value });
                }
                let lag = t - value;
                if i == 0 {
                    first_lag = lag;
                }
                lag_min = lag_min.min(lag);
                lag_max = lag_max.max(lag);
            }
            let scale = horizon.abs().max(t0.abs()).max(1.0);
            let lag = (lag_max - lag_min <= 1e-12 * scale).then(|| {
                if first_lag.abs() <= 1e-12 * scale {
                    0.0
                } else {
                    first_lag
                }
            });
            constant_lags.push(lag);
        }

        let mut buf = vec![0.0; dim];
        let history_points: Vec<f64> = if gamma < t0 {
            grid(gamma, t0).collect()
        } else {
            vec![t0]
        };
        for t in history_points {
            theta.eval_into(t, &mut buf)?;
            if buf.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidProblem(format!(
                    "initial function is not finite at t = {t}"
                )));
            }
        }

        Ok(DelayedProblem {
            name,
            gamma,
            t0,
            horizon,
            dim,
            delays,
            rhs,
            theta,
            lipschitz,
            diff_modulus,
            domain_box,
            constant_lags,
            validation_samples: samples,
        })
    }
}
