use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ddestab::harness::{
    catalog_names, catalog_source, run_certify, run_depend, run_gronwall, run_reduce, run_residual,
    run_solve, run_sweep, GronwallArgs, GronwallForm, RunOptions, RunReport, Sweep, OUT_DIR_ENV,
};

/// Method-of-steps solver and deviation certificates for delay differential systems.
///
/// PROBLEM is a JSON problem file or `catalog:<name>`.
/// Exit status: 0 holds, 2 inconclusive, 3 violated, 1 usage or runtime error.
#[derive(Debug, Parser)]
#[command(name = "ddestab", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Target integrator step.
    #[arg(long, global = true, default_value_t = 1e-3)]
    step: f64,
    /// Directory for output files.
    #[arg(long, global = true, env = OUT_DIR_ENV, default_value = ".")]
    out_dir: PathBuf,
    /// Cross-check solves against a Picard iteration.
    #[arg(long, global = true)]
    picard_check: bool,
    /// Override the problem's final time T.
    #[arg(long, global = true)]
    horizon: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Form {
    Plain,
    Ac,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve and write <name>_solution.csv.
    Solve { problem: String },
    /// Certify an approximate solution against the stability bound.
    Certify {
        problem: String,
        /// Residual level; defaults to the measured residual.
        #[arg(long)]
        eps: Option<f64>,
        /// Approximate solution CSV; defaults to the solution of x' = F + perturbation_b.
        #[arg(long)]
        approx: Option<PathBuf>,
    },
    /// Continuous dependence under a constant shift of the initial function.
    Depend {
        problem: String,
        #[arg(long)]
        delta: f64,
    },
    /// Sweep over shifts or residual levels and write <name>_sweep.csv.
    Sweep {
        problem: String,
        /// Comma-separated initial-function shifts.
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "eps",
            required_unless_present = "eps"
        )]
        delta: Option<Vec<f64>>,
        /// Comma-separated residual levels.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Evaluate a Gronwall envelope and the extremal solution.
    Gronwall {
        /// g(t), an expression in t.
        #[arg(long)]
        g: String,
        /// The kernel h(t) >= 0.
        #[arg(long)]
        h: String,
        /// g'(t) for the ac form; derived symbolically when omitted.
        #[arg(long)]
        g_prime: Option<String>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long = "T", allow_negative_numbers = true)]
        end: f64,
        #[arg(long, value_enum, default_value_t = Form::Plain)]
        form: Form,
    },
    /// Lower a higher-order problem to a first-order system and solve it.
    Reduce { problem: String },
    /// Residual of an approximate solution CSV.
    Residual {
        problem: String,
        #[arg(long)]
        approx: PathBuf,
    },
    /// List the built-in problems, or print one.
    Catalog { name: Option<String> },
}

fn dispatch(cli: Cli) -> ddestab::Result<Option<RunReport>> {
    let c = cli.common;
    let opts = RunOptions {
        step: c.step,
        out_dir: c.out_dir,
        picard_check: c.picard_check,
        horizon: c.horizon,
    };
    let report = match cli.command {
        Command::Solve { problem } => run_solve(&problem, &opts)?,
        Command::Certify {
            problem,
            eps,
            approx,
        } => run_certify(&problem, eps, approx.as_deref(), &opts)?,
        Command::Depend { problem, delta } => run_depend(&problem, delta, &opts)?,
        Command::Sweep {
            problem,
            delta,
            eps,
        } => {
            let sweep = match (delta, eps) {
                (Some(d), _) => Sweep::Delta(d),
                (None, Some(e)) => Sweep::Eps(e),
                (None, None) => unreachable!("clap requires one of --delta, --eps"),
            };
            run_sweep(&problem, &sweep, &opts)?
        }
        Command::Gronwall {
            g,
            h,
            g_prime,
            t0,
            end,
            form,
        } => {
            let args = GronwallArgs {
                g: &g,
                h: &h,
                g_prime: g_prime.as_deref(),
                t0,
                horizon: end,
                form: match form {
                    Form::Plain => GronwallForm::Plain,
                    Form::Ac => GronwallForm::Ac,
                },
            };
            run_gronwall(&args, &opts)?
        }
        Command::Reduce { problem } => run_reduce(&problem, &opts)?,
        Command::Residual { problem, approx } => run_residual(&problem, &approx, &opts)?,
        Command::Catalog { name: None } => {
            for n in catalog_names() {
                println!("{n}");
            }
            return Ok(None);
        }
        Command::Catalog { name: Some(n) } => {
            let src = catalog_source(&n)
                .ok_or_else(|| ddestab::Error::Usage(format!("unknown catalog entry `{n}`")))?;
            print!("{src}");
            return Ok(None);
        }
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(report)) => {
            match serde_json::to_string_pretty(&report) {
                Ok(json) => println!("{json}"),
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
