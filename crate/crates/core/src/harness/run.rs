//! Subcommand implementations shared by the CLI and the tests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;

use super::catalog::read_problem;
use super::csv_io::{read_solution, write_atomic, write_solution, Table};
use super::file::{LoadedProblem, ProblemFile};
use crate::cert::{
    certify_dependence, certify_stability, manufacture_approximation, residual, Certificate,
    Verdict,
};
use crate::dde::{sup_distance, DelayedProblem};
use crate::expr::{parse, time_derivative, EvalEnv, Expr};
use crate::functions::{vector_fn, ScalarFn, VecFn};
use crate::gronwall::{extremal_v, gronwall_bound, gronwall_bound_ac, BoundInputs};
use crate::integrator::{picard_solve, solve, GridConfig, PicardConfig, PicardReport, SolveInfo};
use crate::reduction::{chain_consistency, extract_first};
use crate::{Error, Result};

/// Name of the environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "DDESTAB_OUT_DIR";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub step: f64,
    pub out_dir: PathBuf,
    /// Cross-check each solve against a Picard iteration.
    pub picard_check: bool,
    /// Replaces the file's `T`.
    pub horizon: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            step: GridConfig::default().step,
            out_dir: PathBuf::from("."),
            picard_check: false,
            horizon: None,
        }
    }
}

impl RunOptions {
    pub fn grid(&self) -> GridConfig {
        GridConfig::with_step(self.step)
    }

    fn path(&self, file: String) -> PathBuf {
        self.out_dir.join(file)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PicardCheck {
    pub sup_distance: f64,
    #[serde(flatten)]
    pub report: PicardReport,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    pub problem: Option<String>,
    pub solver: Vec<SolveInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picard: Option<PicardCheck>,
    pub files: Vec<PathBuf>,
    pub verdicts: Vec<Verdict>,
    pub metrics: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    fn start(command: &str, problem: Option<&str>) -> Self {
        RunReport {
            command: command.into(),
            problem: problem.map(str::to_string),
            ..Default::default()
        }
    }

    /// 0 when every verdict holds (or there are none), 3 if any is violated, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.verdicts.contains(&Verdict::Violated) {
            3
        } else if self.verdicts.contains(&Verdict::Inconclusive) {
            2
        } else {
            0
        }
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.into(), v);
    }
}

fn load(spec: &str, opts: &RunOptions) -> Result<(ProblemFile, LoadedProblem)> {
    let mut file = read_problem(spec)?;
    if let Some(t) = opts.horizon {
        file.horizon = t;
    }
    let loaded = file.load()?;
    Ok((file, loaded))
}

fn timed(mut report: RunReport, start: Instant) -> RunReport {
    report.wall_clock_seconds = start.elapsed().as_secs_f64();
    report
}

fn write_certificate(path: &Path, cert: &Certificate, report: &mut RunReport) -> Result<()> {
    write_atomic(path, cert.to_json()?.as_bytes())?;
    report.files.push(path.to_path_buf());
    report.verdicts.push(cert.verdict);
    report.metric("min_margin", cert.min_margin);
    report.metric(
        "max_measured",
        cert.measured.iter().copied().fold(0.0, f64::max),
    );
    report.metric("max_bound", cert.bound.iter().copied().fold(0.0, f64::max));
    report.notes.extend(cert.notes.iter().cloned());
    report.notes.extend(cert.warnings.iter().cloned());
    Ok(())
}

fn picard_check(p: &DelayedProblem, traj: &crate::dde::Trajectory) -> Result<PicardCheck> {
    let pic = picard_solve(p, &PicardConfig::default())?;
    Ok(PicardCheck {
        sup_distance: sup_distance(traj, &pic.trajectory, p.horizon())?,
        report: pic.report,
    })
}

/// Solves and writes `<name>_solution.csv`.
pub fn run_solve(spec: &str, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let (file, loaded) = load(spec, opts)?;
    let mut report = RunReport::start("solve", Some(&file.name));
    let p = &loaded.problem;
    let sol = solve(p, &opts.grid())?;
    let path = opts.path(format!("{}_solution.csv", file.name));
    write_solution(&path, &sol.trajectory)?;
    report.files.push(path);
    report.notes.extend(sol.info.warnings.iter().cloned());
    let end = sol.trajectory.eval(p.horizon())?;
    for (i, v) in end.iter().enumerate() {
        report.metric(&format!("x{}_at_T", i + 1), *v);
    }
    if opts.picard_check {
        let check = picard_check(p, &sol.trajectory)?;
        report.metric("picard_sup_distance", check.sup_distance);
        report.picard = Some(check);
    }
    report.solver.push(sol.info);
    Ok(timed(report, start))
}

/// Certifies an approximate solution: the CSV at `approx` when given, otherwise the solution
/// of `x' = F + b` with the file's `perturbation_b`. Without `eps` the measured residual is used.
pub fn run_certify(
    spec: &str,
    eps: Option<f64>,
    approx: Option<&Path>,
    opts: &RunOptions,
) -> Result<RunReport> {
    let start = Instant::now();
    let (file, loaded) = load(spec, opts)?;
    let mut report = RunReport::start("certify", Some(&file.name));
    let p = &loaded.problem;
    let traj = match (approx, &loaded.perturbation) {
        (Some(path), _) => read_solution(path, p.t0())?,
        (None, Some(b)) => manufacture_approximation(p, b.clone(), &opts.grid())?,
        (None, None) => {
            return Err(Error::Usage(
                "certify needs an approximate solution CSV or a perturbation_b entry in the problem file".into(),
            ))
        }
    };
    let eps = match eps {
        Some(e) => e,
        None => {
            let est = residual(&traj, p)?.eps_est;
            report
                .notes
                .push(format!("eps not given; using the measured residual {est}"));
            est
        }
    };
    let cert = certify_stability(p, &traj, eps, &opts.grid())?;
    write_certificate(
        &opts.path(format!("{}_certificate.json", file.name)),
        &cert,
        &mut report,
    )?;
    report.metric("eps", eps);
    if let Some(e) = cert.inputs.eps_est {
        report.metric("eps_est", e);
    }
    Ok(timed(report, start))
}

fn shifted_theta(p: &DelayedProblem, delta: f64) -> VecFn {
    let theta = p.theta().clone();
    vector_fn(p.dim(), move |t, out| {
        // The initial function was evaluated successfully at build time on the same interval.
        if theta.eval_into(t, out).is_err() {
            out.fill(f64::NAN);
        }
        out.iter_mut().for_each(|v| *v += delta);
    })
}

/// Continuous dependence under the shift `θ̃ = θ + delta`; writes `<name>_dependence.json`.
pub fn run_depend(spec: &str, delta: f64, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let (file, loaded) = load(spec, opts)?;
    let mut report = RunReport::start("depend", Some(&file.name));
    let cert = certify_dependence(
        &loaded.problem,
        shifted_theta(&loaded.problem, delta),
        &opts.grid(),
    )?;
    write_certificate(
        &opts.path(format!("{}_dependence.json", file.name)),
        &cert,
        &mut report,
    )?;
    report.metric("delta", delta);
    Ok(timed(report, start))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// Initial-function shifts.
    Delta(Vec<f64>),
    /// Residual levels; `perturbation_b` is rescaled to sup norm `eps` on `[t0, T]`.
    Eps(Vec<f64>),
}

impl Sweep {
    fn values(&self) -> &[f64] {
        match self {
            Sweep::Delta(v) | Sweep::Eps(v) => v,
        }
    }
}

const SHAPE_SAMPLES: usize = 4096;

fn normalized_shape(p: &DelayedProblem, b: &VecFn) -> Result<(VecFn, f64)> {
    let mut out = vec![0.0; p.dim()];
    let mut sup = 0.0_f64;
    for i in 0..=SHAPE_SAMPLES {
        let t = p.t0() + (p.horizon() - p.t0()) * i as f64 / SHAPE_SAMPLES as f64;
        b.eval_into(t, &mut out)?;
        sup = sup.max(crate::dde::NormPolicy::vector(&out));
    }
    if !(sup > 0.0) || !sup.is_finite() {
        return Err(Error::Usage(
            "perturbation_b must be nonzero and finite for an eps sweep".into(),
        ));
    }
    Ok((b.clone(), sup))
}

fn scaled(b: VecFn, factor: f64) -> VecFn {
    vector_fn(b.dim(), move |t, out| {
        if b.eval_into(t, out).is_err() {
            out.fill(f64::NAN);
        }
        out.iter_mut().for_each(|v| *v *= factor);
    })
}

/// One certificate per sweep value, run concurrently; writes `<name>_sweep.csv` with columns
/// `value, measured_sup, bound_sup, margin`.
///
/// If a member fails, the completed rows go to `<name>_sweep_partial.csv` and the error is
/// returned.
pub fn run_sweep(spec: &str, sweep: &Sweep, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    if sweep.values().len() < 2 {
        return Err(Error::Usage("a sweep needs at least two values".into()));
    }
    let (file, loaded) = load(spec, opts)?;
    let mut report = RunReport::start("sweep", Some(&file.name));
    let p = &loaded.problem;
    let grid = opts.grid();
    let shape = match sweep {
        Sweep::Eps(_) => {
            let b = loaded.perturbation.as_ref().ok_or_else(|| {
                Error::Usage("an eps sweep needs perturbation_b in the problem file".into())
            })?;
            Some(normalized_shape(p, b)?)
        }
        Sweep::Delta(_) => None,
    };
    let member = |value: f64| -> Result<Certificate> {
        match (&shape, sweep) {
            (Some((b, sup)), Sweep::Eps(_)) => {
                let approx = manufacture_approximation(p, scaled(b.clone(), value / sup), &grid)?;
                certify_stability(p, &approx, value, &grid)
            }
            _ => certify_dependence(p, shifted_theta(p, value), &grid),
        }
    };
    let results: Vec<Result<Certificate>> = std::thread::scope(|s| {
        let handles: Vec<_> = sweep
            .values()
            .iter()
            .map(|&v| s.spawn(move || member(v)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Error::Contract("sweep member panicked".into())))
            })
            .collect()
    });

    let mut cols: [Vec<f64>; 4] = Default::default();
    let mut failure = None;
    for (&v, r) in sweep.values().iter().zip(results) {
        match r {
            Ok(c) => {
                cols[0].push(v);
                cols[1].push(c.measured.iter().copied().fold(0.0, f64::max));
                cols[2].push(c.bound.iter().copied().fold(0.0, f64::max));
                cols[3].push(c.min_margin);
                report.verdicts.push(c.verdict);
            }
            Err(e) => {
                failure.get_or_insert((v, e));
            }
        }
    }
    let headers = ["value", "measured_sup", "bound_sup", "margin"]
        .map(String::from)
        .to_vec();
    let table = Table::new(headers, cols.to_vec())?;
    if let Some((v, e)) = failure {
        let path = opts.path(format!("{}_sweep_partial.csv", file.name));
        table.write(&path)?;
        return Err(Error::Contract(format!(
            "sweep member {v} failed: {e}; completed rows written to {}",
            path.display()
        )));
    }
    let path = opts.path(format!("{}_sweep.csv", file.name));
    table.write(&path)?;
    report.files.push(path);
    Ok(timed(report, start))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GronwallForm {
    Plain,
    Ac,
}

impl GronwallForm {
    fn name(self) -> &'static str {
        match self {
            GronwallForm::Plain => "plain",
            GronwallForm::Ac => "ac",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GronwallArgs<'a> {
    pub g: &'a str,
    pub h: &'a str,
    /// Needed by the `ac` form; derived symbolically from `g` when absent.
    pub g_prime: Option<&'a str>,
    pub t0: f64,
    pub horizon: f64,
    pub form: GronwallForm,
}

fn time_expr(what: &str, src: &str) -> Result<Expr> {
    let e = parse(src).map_err(|e| Error::schema(what, e))?;
    e.check_symbols(0, 0)
        .map_err(|err| Error::schema(what, err))?;
    Ok(e)
}

/// Writes `gronwall_<form>.csv` with columns `t, bound, extremal_v` on a grid of `[t0, T]`.
pub fn run_gronwall(args: &GronwallArgs<'_>, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let mut report = RunReport::start("gronwall", None);
    if !(args.t0 < args.horizon) {
        return Err(Error::Usage(format!(
            "need t0 < T, got [{}, {}]",
            args.t0, args.horizon
        )));
    }
    let g = time_expr("g", args.g)?;
    let h: ScalarFn = Arc::new(time_expr("h", args.h)?);
    let mut inputs = BoundInputs::new(Arc::new(g.clone()), h, args.t0);
    if args.form == GronwallForm::Ac {
        let gp = match args.g_prime {
            Some(src) => time_expr("g_prime", src)?,
            None => {
                let d = time_derivative(&g).ok_or_else(|| {
                    Error::Usage(
                        "g is not smooth enough to differentiate symbolically; pass g' explicitly"
                            .into(),
                    )
                })?;
                report.notes.push(format!("g' = {d}"));
                d
            }
        };
        inputs = inputs.with_g_prime(Arc::new(gp));
    }
    let points = ((args.horizon - args.t0) / opts.step).ceil().max(1.0) as usize;
    let mesh: Vec<f64> = (0..=points)
        .map(|i| args.t0 + (args.horizon - args.t0) * i as f64 / points as f64)
        .collect();
    let extremal = extremal_v(&inputs, &mesh)?;
    let mut bound = Vec::with_capacity(mesh.len());
    let mut unconverged = 0usize;
    for &t in &mesh {
        let v = match args.form {
            GronwallForm::Plain => gronwall_bound(&inputs, t)?,
            GronwallForm::Ac => gronwall_bound_ac(&inputs, t)?,
        };
        unconverged += usize::from(!v.converged);
        bound.push(v.value);
    }
    if unconverged > 0 {
        report.notes.push(format!(
            "quadrature did not reach tolerance at {unconverged} point(s)"
        ));
    }
    let gap = bound
        .iter()
        .zip(&extremal)
        .map(|(b, e)| (b - e).abs() / (1.0 + e.abs()))
        .fold(0.0, f64::max);
    report.metric("bound_at_T", *bound.last().expect("nonempty"));
    report.metric("extremal_at_T", *extremal.last().expect("nonempty"));
    report.metric("max_relative_gap", gap);
    let g_env = EvalEnv::time_only(args.horizon);
    report.metric("g_at_T", g.eval(&g_env)?);
    let table = Table::new(
        ["t", "bound", "extremal_v"].map(String::from).to_vec(),
        vec![mesh, bound, extremal],
    )?;
    let path = opts.path(format!("gronwall_{}.csv", args.form.name()));
    table.write(&path)?;
    report.files.push(path);
    Ok(timed(report, start))
}

/// Writes the equivalent first-order file `<name>_reduced.json`, its solution
/// `<name>_solution.csv` and the first component `<name>_first.csv`.
pub fn run_reduce(spec: &str, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let (file, loaded) = load(spec, opts)?;
    let mut report = RunReport::start("reduce", Some(&file.name));
    let order = file.order();
    let reduced = file.reduced()?;
    let path = opts.path(format!("{}_reduced.json", file.name));
    write_atomic(&path, reduced.to_json()?.as_bytes())?;
    report.files.push(path);

    let sol = solve(&loaded.problem, &opts.grid())?;
    let path = opts.path(format!("{}_solution.csv", file.name));
    write_solution(&path, &sol.trajectory)?;
    report.files.push(path);
    let first = extract_first(&sol.trajectory, order)?;
    let path = opts.path(format!("{}_first.csv", file.name));
    write_solution(&path, &first)?;
    report.files.push(path);
    report.metric("order", order as f64);
    if order > 1 {
        let chain = chain_consistency(&sol.trajectory)?;
        report.metric("chain_max_defect", chain.max_defect);
        report.metric(
            "chain_interpolation_tolerance",
            chain.interpolation_tolerance,
        );
        if !chain.within(10.0) {
            report
                .notes
                .push("chain consistency exceeds 10x the interpolation tolerance".into());
        }
    }
    report.solver.push(sol.info);
    Ok(timed(report, start))
}

/// Residual of the approximate solution in `csv`; writes `<name>_residual.csv`.
pub fn run_residual(spec: &str, csv: &Path, opts: &RunOptions) -> Result<RunReport> {
    let start = Instant::now();
    let (file, loaded) = load(spec, opts)?;
    let mut report = RunReport::start("residual", Some(&file.name));
    let traj = read_solution(csv, loaded.problem.t0())?;
    let r = residual(&traj, &loaded.problem)?;
    report.metric("eps_est", r.eps_est);
    report.metric("worst_t", r.worst_t);
    report.notes.push(format!(
        "derivatives: {}",
        serde_json::to_value(r.deriv_source)?.as_str().unwrap_or("")
    ));
    let table = Table::new(
        ["t", "residual"].map(String::from).to_vec(),
        vec![r.times, r.residuals],
    )?;
    let path = opts.path(format!("{}_residual.csv", file.name));
    table.write(&path)?;
    report.files.push(path);
    Ok(timed(report, start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn opts(dir: &Path) -> RunOptions {
        RunOptions {
            out_dir: dir.to_path_buf(),
            ..Default::default()
        }
    }

    #[test]
    fn solve_decay_csv() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_solve("catalog:decay_delay", &opts(dir.path())).unwrap();
        assert!(r.files.iter().all(|f| f.exists()));
        let table = Table::read(&r.files[0]).unwrap();
        let t = table.column("t").unwrap();
        let x = table.column("x1").unwrap();
        let last = t.len() - 1;
        assert_eq!(t[last], 2.0);
        assert!((x[last] + 0.5).abs() < 1e-8);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn solve_with_picard_check() {
        let dir = tempfile::tempdir().unwrap();
        let o = RunOptions {
            picard_check: true,
            ..opts(dir.path())
        };
        let r = run_solve("catalog:alsina_ger", &o).unwrap();
        assert!(r.picard.as_ref().unwrap().sup_distance < 1e-6);
    }

    #[test]
    fn certify_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let o = opts(dir.path());
        let holds = run_certify("catalog:decay_delay", Some(0.001), None, &o).unwrap();
        assert_eq!(holds.exit_code(), 0);
        assert!(holds.metrics["max_measured"] <= 0.002 * E * E);
        let cert =
            Certificate::from_json(&std::fs::read_to_string(&holds.files[0]).unwrap()).unwrap();
        assert_eq!(cert.verdict, Verdict::Holds);

        let inconclusive = run_certify("catalog:decay_delay", Some(1e-6), None, &o).unwrap();
        assert_eq!(inconclusive.exit_code(), 2);

        assert!(matches!(
            run_certify("catalog:alsina_ger", None, None, &o),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn certify_solver_output_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let o = opts(dir.path());
        let solved = run_solve("catalog:decay_delay", &o).unwrap();
        let res = run_residual("catalog:decay_delay", &solved.files[0], &o).unwrap();
        assert!(res.metrics["eps_est"] <= 10.0 * o.step.powi(4));
        let r = run_certify("catalog:decay_delay", None, Some(&solved.files[0]), &o).unwrap();
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn delta_sweep_ratios() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_sweep(
            "catalog:alsina_ger",
            &Sweep::Delta(vec![0.1, 0.01, 0.001]),
            &opts(dir.path()),
        )
        .unwrap();
        let table = Table::read(&r.files[0]).unwrap();
        let m = table.column("measured_sup").unwrap();
        for w in m.windows(2) {
            assert!((w[0] / w[1] - 10.0).abs() < 1e-6);
        }
        assert!((m[0] - 0.1 * E).abs() < 1e-9);
        assert!(matches!(
            run_sweep(
                "catalog:alsina_ger",
                &Sweep::Delta(vec![0.1]),
                &opts(dir.path())
            ),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn eps_sweep_with_zero_modulus() {
        let dir = tempfile::tempdir().unwrap();
        let file = r#"{"name": "flat", "n": 1, "m": 1, "gamma": 0, "t0": 0, "T": 1.5,
            "delays": ["t"], "rhs": ["0"], "theta": ["0"], "lipschitz": 0,
            "perturbation_b": ["sin(3*t)"]}"#;
        let path = dir.path().join("flat.json");
        std::fs::write(&path, file).unwrap();
        let r = run_sweep(
            path.to_str().unwrap(),
            &Sweep::Eps(vec![0.01, 0.001]),
            &opts(dir.path()),
        )
        .unwrap();
        let table = Table::read(&r.files[0]).unwrap();
        let b = table.column("bound_sup").unwrap();
        assert_eq!(b[0], 0.01 * 1.5);
        assert_eq!(b[1], 0.001 * 1.5);
        assert_eq!(r.exit_code(), 0);
    }

    #[test]
    fn gronwall_examples() {
        let dir = tempfile::tempdir().unwrap();
        let o = opts(dir.path());
        let args = GronwallArgs {
            g: "1",
            h: "1",
            g_prime: None,
            t0: 0.0,
            horizon: 1.0,
            form: GronwallForm::Plain,
        };
        let r = run_gronwall(&args, &o).unwrap();
        assert!((r.metrics["bound_at_T"] - E).abs() < 1e-6);
        assert!((r.metrics["extremal_at_T"] - E).abs() < 1e-5);

        let r = run_gronwall(
            &GronwallArgs {
                h: "0",
                ..args.clone()
            },
            &o,
        )
        .unwrap();
        let table = Table::read(&r.files[0]).unwrap();
        assert!(table.column("bound").unwrap().iter().all(|&b| b == 1.0));

        let r = run_gronwall(
            &GronwallArgs {
                g: "t",
                form: GronwallForm::Ac,
                ..args
            },
            &o,
        )
        .unwrap();
        assert!((r.metrics["bound_at_T"] - (E - 1.0)).abs() < 1e-6);
        assert!(r.files[0].ends_with("gronwall_ac.csv"));
    }

    #[test]
    fn reduce_harmonic() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_reduce("catalog:harmonic_order2", &opts(dir.path())).unwrap();
        assert_eq!(r.files.len(), 3);
        assert!(r.metrics["chain_max_defect"] <= 10.0 * r.metrics["chain_interpolation_tolerance"]);
        let reduced =
            ProblemFile::from_json(&std::fs::read_to_string(&r.files[0]).unwrap()).unwrap();
        assert_eq!(reduced.n, 2);
        assert_eq!(reduced.order, None);
        let first = Table::read(&r.files[2]).unwrap();
        for (t, x) in first
            .column("t")
            .unwrap()
            .iter()
            .zip(first.column("x1").unwrap())
        {
            assert!((x - t.sin()).abs() < 1e-6);
        }
    }

    #[test]
    fn delay_bound_violation_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ahead.json");
        let src = super::super::catalog::catalog_source("decay_delay")
            .unwrap()
            .replace("t - 1", "t + 1");
        std::fs::write(&path, src).unwrap();
        let err = run_solve(path.to_str().unwrap(), &opts(dir.path())).unwrap_err();
        assert!(matches!(err, Error::DelayBound { j: 1, .. }), "{err}");
    }
}
