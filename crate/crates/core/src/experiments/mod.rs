//! δ-sweeps under the a priori rule, slope fitting, reports and the
//! randomized check suites behind the `check` and `oracle-compare` commands.

pub mod canonical;
pub mod config;
pub mod fit;
pub mod report;
pub mod suites;
pub mod sweep;

pub use config::{SweepConfig, Truncation};
pub use fit::{fit_slope, SlopeFit};
pub use report::{emit_report, render_report, ReportFormat, SweepReport, SweepRow};
pub use sweep::run_sweep;
