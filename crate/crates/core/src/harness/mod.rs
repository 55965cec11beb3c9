//! Configuration, orchestration of the verification suites, reports and the CLI.

pub mod cli;
mod config;
mod report;
mod suite;

pub use config::{Config, GridConfig, Matrices, QuadratureConfig, Suites, Tolerances, BUNDLED};
pub use report::{Environment, ProblemEcho, VerificationReport};
pub use suite::{fit_slope, run_selected, run_suite, test_function, Selection};
