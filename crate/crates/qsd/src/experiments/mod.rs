//! Config-driven Monte Carlo sweeps over n, distance measurement against the
//! semicircular law, rate fitting, and machine-readable reporting.

mod config;
mod rate;
mod report;
mod sweep;

pub use config::{parse_config, parse_config_str, BaiParamSpec, Pipeline, SweepConfig, VRule};
pub use rate::{fit_rate, DistanceField, RateFit};
pub use report::{emit_report, read_rows_csv, summary_json, ReportPaths};
pub use sweep::{run_sweep, verdicts, ExpectedEsdRow, SweepOutput, SweepRow, Verdicts};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("io failure at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// One-sided rate acceptance: fitted log-log slope must not exceed this.
/// The limit theorems give upper bounds only, so decay faster than the
/// nominal exponent is fine and never penalized.
pub const SLOPE_LIMIT: f64 = -0.35;

/// Allowed growth of `C(n) = distance * n^{2/5}` (and of the analogous
/// `sqrt(n)`-scaled expected-ESD constant) relative to its smallest-n value.
pub const CONSTANT_FACTOR: f64 = 1.5;
