//! Experiment drivers behind the command-line tool.
//!
//! Every driver is a pure function from an [`ExperimentConfig`] to a
//! [`Report`]. Configuration and domain problems surface as errors;
//! failed checks are report content.

pub mod certify;
pub mod config;
pub mod converge;
pub mod diverge;
pub mod pointwise;
pub mod report;
pub mod validate;

pub use config::{ExperimentConfig, ExperimentKind, PathKind, PointSpec};
pub use report::{Cell, Check, OutputFormat, Report, Table};

use crate::error::Result;
use crate::scalar::{format_ratio, Exact};
use num_traits::Zero;

/// Process exit codes of the command-line tool.
pub mod exit_code {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILURE: i32 = 1;
    pub const CONFIG_ERROR: i32 = 2;
}

pub fn run(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::Interpolate => pointwise::run_interpolate(config),
        ExperimentKind::Remainder => pointwise::run_remainder(config),
        ExperimentKind::Converge => converge::run_converge(config),
        ExperimentKind::Diverge => diverge::run_diverge(config),
        ExperimentKind::Certify => certify::run_certify(config),
        ExperimentKind::Validate => validate::run_validate(config),
    }
}

/// Exit code for a finished run.
pub fn exit_code_for(outcome: &Result<Report>) -> i32 {
    match outcome {
        Ok(r) if r.passed() => exit_code::PASS,
        Ok(_) => exit_code::CHECK_FAILURE,
        Err(_) => exit_code::CONFIG_ERROR,
    }
}

/// `p/q` for real values, `p/q + (r/s)i` otherwise.
pub fn format_exact(z: &Exact) -> String {
    if z.im.is_zero() {
        format_ratio(&z.re)
    } else {
        format!("{} + ({})i", format_ratio(&z.re), format_ratio(&z.im))
    }
}
