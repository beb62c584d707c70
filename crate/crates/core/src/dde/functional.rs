use super::{time_tol, DelayedProblem, Trajectory};
use crate::functions::VecFn;
use crate::{Error, Result};

/// Anything that can be evaluated on `[gamma, t]` and fed to a history functional.
pub trait History {
    fn dim(&self) -> usize;
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()>;
}

impl History for Trajectory {
    fn dim(&self) -> usize {
        Trajectory::dim(self)
    }

    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        Trajectory::eval_into(self, t, out)
    }
}

/// `F(t, chi) = f(t, chi(g_1(t)), ..., chi(g_m(t)))`, optionally plus an additive term `b(t)`.
#[derive(Clone)]
pub struct HistoryFunctional {
    problem: DelayedProblem,
    perturbation: Option<VecFn>,
}

impl HistoryFunctional {
    pub fn new(problem: &DelayedProblem) -> Self {
        HistoryFunctional {
            problem: problem.clone(),
            perturbation: None,
        }
    }

    /// The perturbed functional `F + b`.
    pub fn perturbed(problem: &DelayedProblem, b: VecFn) -> Result<Self> {
        if b.dim() != problem.dim() {
            return Err(Error::Contract(format!(
                "perturbation has dimension {}, problem has {}",
                b.dim(),
                problem.dim()
            )));
        }
        Ok(HistoryFunctional {
            problem: problem.clone(),
            perturbation: Some(b),
        })
    }

    pub fn problem(&self) -> &DelayedProblem {
        &self.problem
    }

    pub fn perturbation(&self) -> Option<&VecFn> {
        self.perturbation.as_ref()
    }

    /// Evaluates every delay at `t`, rejecting values outside `[gamma, t]`.
    pub fn delayed_times(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let gamma = self.problem.gamma();
        let tol = time_tol(t);
        for (j, (g, o)) in self.problem.delays().iter().zip(out.iter_mut()).enumerate() {
            let value = g.eval(t)?;
            if !(value >= gamma - tol && value <= t + tol) {
                return Err(Error::DelayBound { j: j + 1, t, value });
            }
            *o = value.clamp(gamma, t.max(gamma));
        }
        Ok(())
    }

    /// `f(t, z) + b(t)` for already gathered delayed states `z` (flattened blocks).
    pub fn eval_at(&self, t: f64, z: &[f64], out: &mut [f64]) -> Result<()> {
        self.problem.rhs().eval_into(t, z, out).map_err(|mut e| {
            e.t.get_or_insert(t);
            Error::Eval(e)
        })?;
        if let Some(b) = &self.perturbation {
            let mut extra = vec![0.0; out.len()];
            b.eval_into(t, &mut extra)?;
            for (o, e) in out.iter_mut().zip(extra) {
                *o += e;
            }
        }
        Ok(())
    }

    pub fn apply_into(&self, t: f64, history: &dyn History, out: &mut [f64]) -> Result<()> {
        let n = self.problem.dim();
        if history.dim() != n {
            return Err(Error::Contract(format!(
                "history has dimension {}, problem has {n}",
                history.dim()
            )));
        }
        let m = self.problem.num_delays();
        let mut times = vec![0.0; m];
        self.delayed_times(t, &mut times)?;
        let mut z = vec![0.0; m * n];
        for (s, block) in times.iter().zip(z.chunks_mut(n)) {
            history.eval_into(*s, block)?;
        }
        self.eval_at(t, &z, out)
    }

    pub fn apply(&self, t: f64, history: &dyn History) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.problem.dim()];
        self.apply_into(t, history, &mut out)?;
        Ok(out)
    }
}

/// Convenience for `HistoryFunctional::new(problem).apply(t, traj)`.
pub fn apply_f(problem: &DelayedProblem, t: f64, traj: &Trajectory) -> Result<Vec<f64>> {
    HistoryFunctional::new(problem).apply(t, traj)
}
