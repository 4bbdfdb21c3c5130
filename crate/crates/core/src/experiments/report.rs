use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::config::Truncation;
use crate::experiments::fit::SlopeFit;
use crate::model::TruthKind;
use crate::params::SpaceParams;
use crate::tikhonov::Rates;

/// One noise level; every quantity is the median over the trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRow {
    pub delta: f64,
    pub alpha: f64,
    /// `‖u_α^δ − u†‖_τ`
    pub err_tau: f64,
    /// `‖u_α^δ − u†‖_a`
    pub err_a: f64,
    /// `R_p(u_α^δ)`
    pub penalty_rp: f64,
    pub support_size: f64,
    pub post_err_tau: Option<f64>,
    pub post_support: Option<f64>,
    /// `T_α^δ(u_α^δ)`
    pub objective: f64,
    /// `T_α^δ(u_α^δ) / (α^κ + δ^σ)`
    pub tikfun_ratio: f64,
    /// `‖u_α^δ − u†‖_a / (α^{(a−q)/N} + δ)`
    pub weak_norm_ratio: f64,
    /// `R_p(u_α^δ) / (α^{κ−1} + δ^σ/α)`
    pub penalty_ratio: f64,
}

/// Log-log slopes against δ. `None` when a quantity hit zero somewhere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSlopes {
    pub slope_err_tau: Option<SlopeFit>,
    pub slope_err_a: Option<SlopeFit>,
    pub slope_penalty: Option<SlopeFit>,
    pub slope_support: Option<SlopeFit>,
    pub slope_post_err: Option<SlopeFit>,
    pub slope_post_support: Option<SlopeFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepMetadata {
    pub seed: u64,
    pub n: usize,
    pub params: SpaceParams,
    pub truth_kind: TruthKind,
    pub decay_margin: f64,
    pub trials_per_delta: usize,
    pub truncation: Truncation,
    pub note: String,
    pub wall_time_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub slopes: SweepSlopes,
    pub predicted: Rates,
    pub metadata: SweepMetadata,
}

impl SweepReport {
    pub fn slope(fit: &Option<SlopeFit>) -> Option<f64> {
        fit.map(|f| f.slope)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::InvalidInput(format!("unknown report format {other:?}"))),
        }
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "delta",
    "alpha",
    "err_tau",
    "err_a",
    "penalty_rp",
    "support_size",
    "post_err_tau",
    "post_support",
    "objective",
    "tikfun_ratio",
    "weak_norm_ratio",
    "penalty_ratio",
];

/// 17 significant digits.
fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

fn render_csv(report: &SweepReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER)?;
    for row in &report.rows {
        writer.write_record([
            real(row.delta),
            real(row.alpha),
            real(row.err_tau),
            real(row.err_a),
            real(row.penalty_rp),
            real(row.support_size),
            opt_real(row.post_err_tau),
            opt_real(row.post_support),
            real(row.objective),
            real(row.tikfun_ratio),
            real(row.weak_norm_ratio),
            real(row.penalty_ratio),
        ])?;
    }
    let mut out = String::from_utf8(writer.into_inner().map_err(|e| Error::Io(e.into_error()))?)
        .expect("csv output is utf-8");
    let s = &report.slopes;
    for (name, fit) in [
        ("slope_err_tau", &s.slope_err_tau),
        ("slope_err_a", &s.slope_err_a),
        ("slope_penalty", &s.slope_penalty),
        ("slope_support", &s.slope_support),
        ("slope_post_err", &s.slope_post_err),
        ("slope_post_support", &s.slope_post_support),
    ] {
        let value = fit.map(|f| real(f.slope)).unwrap_or_else(|| "none".into());
        writeln!(out, "# {name}={value}").unwrap();
    }
    let m = &report.metadata;
    writeln!(out, "# gamma1={}", real(report.predicted.gamma1)).unwrap();
    writeln!(out, "# gamma2={}", real(report.predicted.gamma2)).unwrap();
    writeln!(out, "# seed={}", m.seed).unwrap();
    writeln!(out, "# n={}", m.n).unwrap();
    writeln!(
        out,
        "# params=p:{} q:{} tau:{} a:{} sigma:{}",
        m.params.p, m.params.q, m.params.tau, m.params.a, m.params.sigma
    )
    .unwrap();
    writeln!(out, "# tail_norm={}", real(m.truncation.tail_norm)).unwrap();
    writeln!(out, "# tail_dominated={}", m.truncation.tail_dominated).unwrap();
    if let Some(t) = m.wall_time_s {
        writeln!(out, "# wall_time_s={}", real(t)).unwrap();
    }
    writeln!(out, "# note={}", m.note).unwrap();
    Ok(out)
}

pub fn render_report(report: &SweepReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(report)?;
            text.push('\n');
            Ok(text)
        }
        ReportFormat::Csv => render_csv(report),
    }
}

pub fn emit_report(report: &SweepReport, format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render_report(report, format)?)?;
    Ok(())
}
