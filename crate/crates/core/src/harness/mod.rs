//! Problem files, CSV/JSON reports and the subcommands built on them.

pub mod catalog;
pub mod csv_io;
pub mod file;
mod run;

pub use catalog::{catalog_names, catalog_problem, catalog_source, read_problem, CATALOG_PREFIX};
pub use csv_io::{read_solution, solution_table, write_atomic, write_solution, Table};
pub use file::{LoadedProblem, ModulusSpec, ProblemFile};
pub use run::{
    run_certify, run_depend, run_gronwall, run_reduce, run_residual, run_solve, run_sweep,
    GronwallArgs, GronwallForm, PicardCheck, RunOptions, RunReport, Sweep, OUT_DIR_ENV,
};
