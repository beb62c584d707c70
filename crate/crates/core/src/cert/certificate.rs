use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::bounds::{dependence_curve, perturbation_curve, stability_curve};
use super::residual::residual;
use crate::dde::{
    sup_distance, sup_distance_curve, time_tol, DelayedProblem, NormPolicy, SupConfig, Trajectory,
};
use crate::expr::{sampled_modulus, DomainBox, LipschitzConfig};
use crate::functions::{ScalarFn, VecFn};
use crate::integrator::{solve, solve_perturbed, GridConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Perturbation,
    Dependence,
    Stability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Violated,
    /// A hypothesis of the bound could not be confirmed, e.g. the residual exceeds `eps`.
    Inconclusive,
}

/// How a modulus entered the computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusDigest {
    pub description: String,
    pub sampled: bool,
    pub safety_factor: Option<f64>,
    pub domain_box: Option<DomainBox>,
    pub profile_times: Vec<f64>,
    pub profile: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputsDigest {
    pub eps: Option<f64>,
    pub eps_est: Option<f64>,
    pub theta_dist: Option<f64>,
    pub k: ModulusDigest,
    pub h: Option<ModulusDigest>,
    pub t0: f64,
    pub horizon: f64,
}

/// A bound curve and a measured deviation curve on a shared mesh of `[t0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub problem: String,
    pub verdict: Verdict,
    /// The Lipschitz modulus was estimated by sampling rather than supplied.
    pub sampled_k: bool,
    pub min_margin: f64,
    /// Minimum margin over mesh points strictly after `t0`.
    pub min_margin_after_t0: Option<f64>,
    pub slack: f64,
    pub inputs: InputsDigest,
    pub mesh: Vec<f64>,
    pub bound: Vec<f64>,
    pub measured: Vec<f64>,
    pub margin: Vec<f64>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }
}

/// Slack allowed below zero margin, relative to the bound scale.
pub const MARGIN_SLACK: f64 = 1e-9;
/// Absolute slack when comparing a measured residual with `eps`.
pub const RESIDUAL_SLACK: f64 = 1e-12;
const PROFILE_POINTS: usize = 17;

struct Resolved {
    f: ScalarFn,
    digest: ModulusDigest,
}

fn profile_times(t0: f64, horizon: f64) -> Vec<f64> {
    (0..PROFILE_POINTS)
        .map(|i| t0 + (horizon - t0) * i as f64 / (PROFILE_POINTS - 1) as f64)
        .collect()
}

fn describe_given(f: &ScalarFn, t0: f64, horizon: f64) -> Result<ModulusDigest> {
    let times = profile_times(t0, horizon);
    let profile = times
        .iter()
        .map(|&t| f.eval(t))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(ModulusDigest {
        description: f.describe(),
        sampled: false,
        safety_factor: None,
        domain_box: None,
        profile_times: times,
        profile,
    })
}

/// Bounding box of the trajectories, padded on every side.
fn hull(trajs: &[&Trajectory]) -> Result<DomainBox> {
    let n = trajs[0].dim();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for tr in trajs {
        for i in 0..tr.len() {
            for (c, &v) in tr.value(i).iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
    }
    for c in 0..n {
        let pad = 0.1 * (hi[c] - lo[c]) + 0.05 * (1.0 + lo[c].abs().max(hi[c].abs()));
        lo[c] -= pad;
        hi[c] += pad;
    }
    DomainBox::new(lo, hi)
}

/// The problem's modulus when supplied, otherwise a sampled one on the problem's domain box
/// (or the padded hull of `trajs` when no box is declared).
fn resolve_k(
    p: &DelayedProblem,
    trajs: &[&Trajectory],
    warnings: &mut Vec<String>,
) -> Result<Resolved> {
    let (t0, horizon) = (p.t0(), p.horizon());
    if let Some(k) = p.lipschitz() {
        return Ok(Resolved {
            f: k.clone(),
            digest: describe_given(k, t0, horizon)?,
        });
    }
    let domain = match p.domain_box() {
        Some(b) => b.clone(),
        None => {
            warnings.push(
                "no domain box declared; Lipschitz modulus sampled on the padded trajectory hull"
                    .into(),
            );
            hull(trajs)?
        }
    };
    let cfg = LipschitzConfig::default();
    let times = profile_times(t0, horizon);
    let tab = sampled_modulus(p.rhs().as_ref(), &domain, &times, &cfg)?;
    let profile = tab.values().to_vec();
    Ok(Resolved {
        f: Arc::new(tab),
        digest: ModulusDigest {
            description: format!("sampled (safety factor {})", cfg.safety_factor),
            sampled: true,
            safety_factor: Some(cfg.safety_factor),
            domain_box: Some(domain),
            profile_times: times,
            profile,
        },
    })
}

/// Union of the meshes of `a` and `b` restricted to `[t0, T]`.
fn union_mesh(a: &Trajectory, b: &Trajectory, t0: f64, horizon: f64) -> Vec<f64> {
    let lo = t0 - time_tol(t0);
    let hi = horizon + time_tol(horizon);
    let mut mesh: Vec<f64> = a
        .mesh()
        .iter()
        .chain(b.mesh())
        .copied()
        .filter(|&t| t >= lo && t <= hi)
        .map(|t| t.clamp(t0, horizon))
        .collect();
    mesh.sort_by(f64::total_cmp);
    mesh.dedup_by(|x, y| (*x - *y).abs() <= time_tol(*y));
    mesh
}

fn check_cover(tr: &Trajectory, p: &DelayedProblem, what: &str) -> Result<()> {
    if tr.dim() != p.dim() {
        return Err(Error::Contract(format!(
            "{what} has dimension {}, problem has {}",
            tr.dim(),
            p.dim()
        )));
    }
    if (tr.gamma() - p.gamma()).abs() > time_tol(p.gamma())
        || tr.front() < p.horizon() - time_tol(p.horizon())
    {
        return Err(Error::Contract(format!(
            "{what} covers [{}, {}] but the problem needs [{}, {}]",
            tr.gamma(),
            tr.front(),
            p.gamma(),
            p.horizon()
        )));
    }
    Ok(())
}

/// `sup ‖θ − θ̃‖` on a fine grid of `[gamma, t0]`, never below the trajectories' own `v(t0)`.
fn theta_distance(
    p: &DelayedProblem,
    theta_alt: &VecFn,
    x: &Trajectory,
    y: &Trajectory,
) -> Result<f64> {
    const GRID: usize = 1024;
    let (gamma, t0) = (p.gamma(), p.t0());
    let mut alt = vec![0.0; p.dim()];
    let mut worst = 0.0_f64;
    let points = if gamma < t0 { GRID } else { 0 };
    for i in 0..=points {
        let t = if points == 0 {
            t0
        } else {
            gamma + (t0 - gamma) * i as f64 / points as f64
        };
        let base = p.theta_at(t)?;
        theta_alt.eval_into(t, &mut alt)?;
        worst = worst.max(NormPolicy::distance(&base, &alt));
    }
    Ok(worst.max(sup_distance(x, y, t0)?))
}

struct Assembly {
    kind: CertificateKind,
    problem: String,
    mesh: Vec<f64>,
    bound: Vec<f64>,
    measured: Vec<f64>,
    hypothesis_ok: bool,
    inputs: InputsDigest,
    notes: Vec<String>,
    warnings: Vec<String>,
}

fn assemble(a: Assembly) -> Certificate {
    let margin: Vec<f64> = a
        .bound
        .iter()
        .zip(&a.measured)
        .map(|(b, m)| b - m)
        .collect();
    let min_margin = margin.iter().copied().fold(f64::INFINITY, f64::min);
    let t0 = a.inputs.t0;
    let after = a
        .mesh
        .iter()
        .zip(&margin)
        .filter(|(t, _)| **t > t0 + time_tol(t0))
        .map(|(_, m)| *m)
        .fold(None, |acc: Option<f64>, m| {
            Some(acc.map_or(m, |a| a.min(m)))
        });
    let scale = 1.0 + a.bound.iter().copied().fold(0.0, f64::max);
    let slack = MARGIN_SLACK * scale;
    let verdict = if !a.hypothesis_ok {
        Verdict::Inconclusive
    } else if min_margin >= -slack {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    Certificate {
        kind: a.kind,
        problem: a.problem,
        verdict,
        sampled_k: a.inputs.k.sampled,
        min_margin,
        min_margin_after_t0: after,
        slack,
        inputs: a.inputs,
        mesh: a.mesh,
        bound: a.bound,
        measured: a.measured,
        margin,
        notes: a.notes,
        warnings: a.warnings,
    }
}

/// An approximate solution built by integrating `F + b` with the problem's initial function.
/// Its residual against `F` is `‖b‖` at the nodes.
pub fn manufacture_approximation(
    p: &DelayedProblem,
    b: VecFn,
    cfg: &GridConfig,
) -> Result<Trajectory> {
    Ok(solve_perturbed(p, b, cfg)?.trajectory)
}

/// Compares `approx` with the exact solution sharing its initial segment against
/// `eps (t - t0) exp(∫ k)`.
///
/// If the residual of `approx` exceeds `eps` the curves are still reported but the verdict
/// is [`Verdict::Inconclusive`].
pub fn certify_stability(
    p: &DelayedProblem,
    approx: &Trajectory,
    eps: f64,
    cfg: &GridConfig,
) -> Result<Certificate> {
    if !(eps >= 0.0) {
        return Err(Error::Contract(format!(
            "eps must be nonnegative, got {eps}"
        )));
    }
    check_cover(approx, p, "approximate solution")?;
    let report = residual(approx, p)?;
    let hypothesis_ok = report.eps_est <= eps + RESIDUAL_SLACK;
    let mut notes = Vec::new();
    if !hypothesis_ok {
        notes.push(format!(
            "residual {} at t = {} exceeds eps = {eps}; the stability hypothesis is not met",
            report.eps_est, report.worst_t
        ));
    }
    let theta_approx: VecFn = match approx.history() {
        Some(h) => h.clone(),
        None => Arc::new(approx.clone()),
    };
    let exact = solve(&p.with_theta(theta_approx)?, cfg)?;
    let mut warnings = exact.info.warnings.clone();
    let mesh = union_mesh(&exact.trajectory, approx, p.t0(), p.horizon());
    let measured = sup_distance_curve(&exact.trajectory, approx, &mesh, &SupConfig::default())?;
    let k = resolve_k(p, &[&exact.trajectory, approx], &mut warnings)?;
    let bound = stability_curve(eps, &k.f, p.t0(), &mesh)?;
    Ok(assemble(Assembly {
        kind: CertificateKind::Stability,
        problem: p.name().to_string(),
        mesh,
        bound,
        measured,
        hypothesis_ok,
        inputs: InputsDigest {
            eps: Some(eps),
            eps_est: Some(report.eps_est),
            theta_dist: None,
            k: k.digest,
            h: None,
            t0: p.t0(),
            horizon: p.horizon(),
        },
        notes,
        warnings,
    }))
}

/// Solves with `θ` and `theta_alt` and compares the deviation with `‖θ − θ̃‖ exp(∫ k)`.
pub fn certify_dependence(
    p: &DelayedProblem,
    theta_alt: VecFn,
    cfg: &GridConfig,
) -> Result<Certificate> {
    let alt = p.with_theta(theta_alt.clone())?;
    let x = solve(p, cfg)?;
    let y = solve(&alt, cfg)?;
    let mut warnings = x.info.warnings.clone();
    warnings.extend(y.info.warnings.iter().cloned());
    let theta_dist = theta_distance(p, &theta_alt, &x.trajectory, &y.trajectory)?;
    let mesh = union_mesh(&x.trajectory, &y.trajectory, p.t0(), p.horizon());
    let measured = sup_distance_curve(&x.trajectory, &y.trajectory, &mesh, &SupConfig::default())?;
    let k = resolve_k(p, &[&x.trajectory, &y.trajectory], &mut warnings)?;
    let bound = dependence_curve(theta_dist, &k.f, p.t0(), &mesh)?;
    Ok(assemble(Assembly {
        kind: CertificateKind::Dependence,
        problem: p.name().to_string(),
        mesh,
        bound,
        measured,
        hypothesis_ok: true,
        inputs: InputsDigest {
            eps: None,
            eps_est: None,
            theta_dist: Some(theta_dist),
            k: k.digest,
            h: None,
            t0: p.t0(),
            horizon: p.horizon(),
        },
        notes: Vec::new(),
        warnings,
    }))
}

/// Two problems on the same interval with right-hand sides `F`, `F̃` and initial functions
/// `θ`, `θ̃`, compared against `‖θ − θ̃‖ exp(∫ (h + k))`.
///
/// Two readings of the hypothesis on `h` are checked and reported in the notes: the
/// pointwise `‖F(t,z) − F̃(t,z)‖ <= h(t)‖z‖` on sampled `z`, and the deviation form
/// `‖F(t, x̃_t) − F̃(t, x̃_t)‖ <= h(t) v(t)` along the computed trajectories. The verdict
/// reflects only the measured comparison.
pub fn certify_perturbation(
    p: &DelayedProblem,
    alt: &DelayedProblem,
    h: ScalarFn,
    cfg: &GridConfig,
) -> Result<Certificate> {
    if alt.dim() != p.dim() || alt.num_delays() != p.num_delays() {
        return Err(Error::Contract(
            "perturbed problem must have the same shape".into(),
        ));
    }
    if (alt.t0() - p.t0()).abs() > time_tol(p.t0())
        || (alt.gamma() - p.gamma()).abs() > time_tol(p.gamma())
    {
        return Err(Error::Contract(
            "perturbed problem must share gamma and t0".into(),
        ));
    }
    let x = solve(p, cfg)?;
    let y = solve(&alt.with_horizon(p.horizon())?, cfg)?;
    let mut warnings = x.info.warnings.clone();
    warnings.extend(y.info.warnings.iter().cloned());
    let theta_dist = theta_distance(p, alt.theta(), &x.trajectory, &y.trajectory)?;
    let mesh = union_mesh(&x.trajectory, &y.trajectory, p.t0(), p.horizon());
    let measured = sup_distance_curve(&x.trajectory, &y.trajectory, &mesh, &SupConfig::default())?;
    let k = resolve_k(p, &[&x.trajectory, &y.trajectory], &mut warnings)?;
    let bound = perturbation_curve(theta_dist, &h, &k.f, p.t0(), &mesh)?;

    let mut notes = Vec::new();
    let samples_box = match p.domain_box() {
        Some(b) => b.clone(),
        None => hull(&[&x.trajectory, &y.trajectory])?,
    };
    if let Some((t, lhs, rhs)) = pointwise_hypothesis_failure(p, alt, &h, &samples_box)? {
        notes.push(format!(
            "pointwise hypothesis ‖F − F̃‖ <= h‖z‖ fails at t = {t}: {lhs} > {rhs}"
        ));
    }
    let functional = crate::dde::HistoryFunctional::new(p);
    let functional_alt = crate::dde::HistoryFunctional::new(alt);
    for (i, &t) in mesh.iter().enumerate() {
        let a = functional.apply(t, &y.trajectory)?;
        let b = functional_alt.apply(t, &y.trajectory)?;
        let lhs = NormPolicy::distance(&a, &b);
        let rhs = h.eval(t)? * measured[i];
        if lhs > rhs * (1.0 + 1e-9) + 1e-15 {
            notes.push(format!(
                "deviation-form hypothesis ‖F(t, x̃_t) − F̃(t, x̃_t)‖ <= h(t) v(t) fails at t = {t}: {lhs} > {rhs}"
            ));
            break;
        }
    }
    Ok(assemble(Assembly {
        kind: CertificateKind::Perturbation,
        problem: p.name().to_string(),
        mesh,
        bound,
        measured,
        hypothesis_ok: true,
        inputs: InputsDigest {
            eps: None,
            eps_est: None,
            theta_dist: Some(theta_dist),
            k: k.digest,
            h: Some(describe_given(&h, p.t0(), p.horizon())?),
            t0: p.t0(),
            horizon: p.horizon(),
        },
        notes,
        warnings,
    }))
}

fn pointwise_hypothesis_failure(
    p: &DelayedProblem,
    alt: &DelayedProblem,
    h: &ScalarFn,
    domain: &DomainBox,
) -> Result<Option<(f64, f64, f64)>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let (n, m) = (p.dim(), p.num_delays());
    let mut z = vec![0.0; n * m];
    let (mut fa, mut fb) = (vec![0.0; n], vec![0.0; n]);
    for t in profile_times(p.t0(), p.horizon()) {
        for _ in 0..64 {
            for (k, v) in z.iter_mut().enumerate() {
                let c = k % n;
                *v = rng.gen_range(domain.lower[c]..=domain.upper[c]);
            }
            p.rhs().eval_into(t, &z, &mut fa)?;
            alt.rhs().eval_into(t, &z, &mut fb)?;
            let lhs = NormPolicy::distance(&fa, &fb);
            let rhs = h.eval(t)? * NormPolicy::vector(&z);
            if lhs > rhs * (1.0 + 1e-9) + 1e-15 {
                return Ok(Some((t, lhs, rhs)));
            }
        }
    }
    Ok(None)
}
