//! Configuration, reports and the command-line front end.

mod cli;
mod config;
mod report;

pub use cli::{exit_code, run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
pub use config::{SolverConfig, KEYS, OUTPUT_ENV};
pub use report::{fmt_real, Format, RunReport, Spectra, SCHEMA_VERSION};
