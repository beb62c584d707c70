use serde::Serialize;

use super::mesh::{forward_nodes, history_nodes};
use super::GridConfig;
use crate::dde::{time_tol, DelayedProblem, HistoryFunctional, NormPolicy, Trajectory};
use crate::functions::VecFn;
use crate::{Error, Result};

/// Stage data of one accepted step, kept so that the stage derivatives can be re-checked
/// against the final dense output.
#[derive(Debug, Clone)]
pub struct StageRecord {
    pub t: f64,
    pub h: f64,
    /// Stage states `Y_1..Y_4`, each of the problem dimension, concatenated.
    pub states: Vec<f64>,
    /// Stage derivatives `K_1..K_4`.
    pub derivs: Vec<f64>,
}

const STAGE_C: [f64; 4] = [0.0, 0.5, 0.5, 1.0];

impl StageRecord {
    pub fn stage_time(&self, i: usize) -> f64 {
        self.t + STAGE_C[i] * self.h
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SolveInfo {
    pub step: f64,
    pub mesh_size: usize,
    pub accepted_steps: usize,
    pub breaking_points: Vec<f64>,
    /// True when some delay is not a constant lag, so no breaking points were propagated for it.
    pub uniform_mesh_for_variable_delays: bool,
    pub overlap_steps: usize,
    pub overlap_iterations: usize,
    pub max_overlap_iterations_used: usize,
    pub halvings: u32,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub stages: Vec<StageRecord>,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub trajectory: Trajectory,
    pub info: SolveInfo,
}

pub fn solve(problem: &DelayedProblem, cfg: &GridConfig) -> Result<Solution> {
    solve_functional(&HistoryFunctional::new(problem), cfg)
}

/// Solves `x' = F(t, x_t) + b(t)` with the initial function of `problem`.
pub fn solve_perturbed(problem: &DelayedProblem, b: VecFn, cfg: &GridConfig) -> Result<Solution> {
    solve_functional(&HistoryFunctional::perturbed(problem, b)?, cfg)
}

pub fn solve_functional(functional: &HistoryFunctional, cfg: &GridConfig) -> Result<Solution> {
    let p = functional.problem();
    let (gamma, t0, horizon) = (p.gamma(), p.t0(), p.horizon());
    cfg.validate(horizon - t0)?;
    let n = p.dim();

    let mut traj = Trajectory::start(n, Some(p.theta().clone()));
    for t in history_nodes(gamma, t0, cfg.step) {
        let x = p.theta_at(t)?;
        let dx = theta_slope(p, t, cfg.step)?;
        traj.push(t, &x, &dx);
    }
    traj.mark_t0();
    let f0 = functional.apply(t0, &traj)?;
    traj.set_deriv(traj.t0_index(), &f0);

    let (nodes, bps) = forward_nodes(p, cfg.step, cfg.breaking_points);
    let mut info = SolveInfo {
        step: cfg.step,
        breaking_points: bps,
        uniform_mesh_for_variable_delays: p.constant_lags().iter().any(Option::is_none),
        ..Default::default()
    };

    let stepper = Stepper::new(functional, cfg);
    let mut t = t0;
    let mut x = traj.value(traj.t0_index()).to_vec();
    let mut fx = f0;
    let mut left_box = false;
    for &target in &nodes {
        let mut h = target - t;
        let mut halvings = 0;
        while target - t > time_tol(target) {
            let h_try = h.min(target - t);
            match stepper.step(&traj, t, &x, &fx, h_try)? {
                Some(step) => {
                    let t_new = if h_try >= target - t {
                        target
                    } else {
                        t + h_try
                    };
                    if step.x1.iter().chain(&step.f1).any(|v| !v.is_finite()) {
                        return Err(Error::Blowup { t: t_new });
                    }
                    traj.push(t_new, &step.x1, &step.f1);
                    if step.iterations > 1 || step.overlap {
                        info.overlap_steps += usize::from(step.overlap);
                        info.overlap_iterations += step.iterations;
                        info.max_overlap_iterations_used =
                            info.max_overlap_iterations_used.max(step.iterations);
                    }
                    info.stages.push(step.record);
                    info.accepted_steps += 1;
                    if let (false, Some(b)) = (left_box, p.domain_box()) {
                        if !b.contains(&step.x1) {
                            left_box = true;
                            info.warnings
                                .push(format!("trajectory leaves the domain box at t = {t_new}"));
                        }
                    }
                    t = t_new;
                    x = step.x1;
                    fx = step.f1;
                }
                None => {
                    halvings += 1;
                    info.halvings += 1;
                    if halvings > cfg.max_halvings {
                        return Err(Error::OverlapDivergence {
                            t,
                            halvings: cfg.max_halvings,
                        });
                    }
                    h = h_try / 2.0;
                }
            }
        }
    }
    info.mesh_size = traj.len();
    Ok(Solution {
        trajectory: traj,
        info,
    })
}

/// Slope of the initial function at a history node, by central differences kept inside
/// `[gamma, t0]`.
fn theta_slope(p: &DelayedProblem, t: f64, step: f64) -> Result<Vec<f64>> {
    let n = p.dim();
    if p.gamma() >= p.t0() {
        return Ok(vec![0.0; n]);
    }
    let delta = (1e-6 * t.abs().max(1.0)).min(step / 4.0);
    let a = (t - delta).max(p.gamma());
    let b = (t + delta).min(p.t0());
    let (xa, xb) = (p.theta_at(a)?, p.theta_at(b)?);
    Ok(xa.iter().zip(&xb).map(|(u, v)| (v - u) / (b - a)).collect())
}

struct StepResult {
    x1: Vec<f64>,
    f1: Vec<f64>,
    iterations: usize,
    overlap: bool,
    record: StageRecord,
}

struct Stepper<'a> {
    functional: &'a HistoryFunctional,
    cfg: &'a GridConfig,
    n: usize,
    m: usize,
}

/// Where delayed arguments inside the current step are read from.
struct Segment<'a> {
    t: f64,
    h: f64,
    x0: &'a [f64],
    f0: &'a [f64],
    x1: &'a [f64],
    f1: &'a [f64],
}

impl<'a> Stepper<'a> {
    fn new(functional: &'a HistoryFunctional, cfg: &'a GridConfig) -> Self {
        let p = functional.problem();
        Stepper {
            functional,
            cfg,
            n: p.dim(),
            m: p.num_delays(),
        }
    }

    /// `F` at stage time `s` with stage state `y`. Arguments equal to `s` take `y`, those up
    /// to the step start come from `traj`, and the rest from the tentative segment.
    fn stage(
        &self,
        traj: &Trajectory,
        s: f64,
        y: &[f64],
        seg: &Segment<'_>,
        out: &mut [f64],
        overlap: &mut bool,
    ) -> Result<()> {
        let n = self.n;
        let mut times = vec![0.0; self.m];
        self.functional.delayed_times(s, &mut times)?;
        let mut z = vec![0.0; self.m * n];
        for (&g, block) in times.iter().zip(z.chunks_mut(n)) {
            if (g - s).abs() <= time_tol(s) {
                block.copy_from_slice(y);
            } else if g <= seg.t + time_tol(seg.t) {
                traj.eval_into(g.min(seg.t), block)?;
            } else {
                *overlap = true;
                crate::dde::hermite(
                    seg.t,
                    seg.t + seg.h,
                    seg.x0,
                    seg.f0,
                    seg.x1,
                    seg.f1,
                    g,
                    block,
                );
            }
        }
        self.functional.eval_at(s, &z, out)
    }

    fn step(
        &self,
        traj: &Trajectory,
        t: f64,
        x0: &[f64],
        f0: &[f64],
        h: f64,
    ) -> Result<Option<StepResult>> {
        let n = self.n;
        let axpy =
            |a: f64, k: &[f64]| -> Vec<f64> { x0.iter().zip(k).map(|(x, k)| x + a * k).collect() };
        let mut x1 = axpy(h, f0);
        let mut f1 = f0.to_vec();
        let (mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut f1_new = vec![0.0; n];
        for iteration in 1..=self.cfg.max_overlap_iterations {
            let mut overlap = false;
            let seg = Segment {
                t,
                h,
                x0,
                f0,
                x1: &x1,
                f1: &f1,
            };
            let y2 = axpy(h / 2.0, f0);
            self.stage(traj, t + h / 2.0, &y2, &seg, &mut k2, &mut overlap)?;
            let y3 = axpy(h / 2.0, &k2);
            self.stage(traj, t + h / 2.0, &y3, &seg, &mut k3, &mut overlap)?;
            let y4 = axpy(h, &k3);
            self.stage(traj, t + h, &y4, &seg, &mut k4, &mut overlap)?;
            let x1_new: Vec<f64> = (0..n)
                .map(|i| x0[i] + h / 6.0 * (f0[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
            let seg = Segment { x1: &x1_new, ..seg };
            self.stage(traj, t + h, &x1_new, &seg, &mut f1_new, &mut overlap)?;

            let change =
                NormPolicy::distance(&x1_new, &x1).max(h * NormPolicy::distance(&f1_new, &f1));
            let scale = 1.0 + NormPolicy::vector(&x1_new);
            x1 = x1_new;
            std::mem::swap(&mut f1, &mut f1_new);
            if !overlap || change <= self.cfg.overlap_tolerance * scale {
                let record = StageRecord {
                    t,
                    h,
                    states: [x0, &y2, &y3, &y4].concat(),
                    derivs: [f0, &k2, &k3, &k4].concat(),
                };
                return Ok(Some(StepResult {
                    x1,
                    f1,
                    iterations: iteration,
                    overlap,
                    record,
                }));
            }
        }
        Ok(None)
    }
}

/// Largest difference between the recorded stage derivatives and `F` re-evaluated at the
/// stage times against the final dense output (arguments equal to the stage time still
/// take the stage state).
pub fn stage_defect(solution: &Solution, functional: &HistoryFunctional) -> Result<f64> {
    let p = functional.problem();
    let (n, m) = (p.dim(), p.num_delays());
    let traj = &solution.trajectory;
    let mut times = vec![0.0; m];
    let mut z = vec![0.0; m * n];
    let mut k = vec![0.0; n];
    let mut worst = 0.0_f64;
    for rec in &solution.info.stages {
        for i in 0..4 {
            let s = rec.stage_time(i);
            let y = &rec.states[i * n..(i + 1) * n];
            functional.delayed_times(s, &mut times)?;
            for (&g, block) in times.iter().zip(z.chunks_mut(n)) {
                if (g - s).abs() <= time_tol(s) {
                    block.copy_from_slice(y);
                } else {
                    traj.eval_into(g, block)?;
                }
            }
            functional.eval_at(s, &z, &mut k)?;
            worst = worst.max(NormPolicy::distance(&k, &rec.derivs[i * n..(i + 1) * n]));
        }
    }
    Ok(worst)
}
