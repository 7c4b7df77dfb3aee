//! CSV and JSON writers. Column layouts are listed in `schemas.md`.
//!
//! Every float is written with 17 significant digits (`{:.16e}`), which
//! round-trips through `f64::from_str`; non-finite values are written as
//! `inf`, `-inf` or `NaN`.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use ruinrate_core::{BoundReport, DualityReport, McEstimate, PathSample};
use serde::Serialize;

use crate::tables::{CurvePoint, TableRow};

/// Formats a float for CSV output.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn write_csv<P: AsRef<Path>>(path: P, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const TABLE_HEADER: [&str; 9] =
    ["series", "sigma", "eta", "lambda_star", "k", "residual", "paper_value", "abs_diff", "matches_print"];

pub const TABLE3_HEADER: [&str; 9] =
    ["series", "sigma", "eta", "lambda_star", "k", "residual", "paper_value", "abs_diff", "discrepancy"];

fn table_record(r: &TableRow, last: bool) -> Vec<String> {
    vec![
        r.series.to_string(),
        num(r.sigma),
        num(r.eta),
        num(r.rate.lambda_star),
        num(r.rate.k),
        num(r.rate.residual),
        num(r.published),
        num(r.abs_diff()),
        flag(last),
    ]
}

/// Tables 1 and 2: the last column says whether `k` rounds to the printed value.
pub fn write_table<P: AsRef<Path>>(path: P, rows: &[TableRow]) -> Result<()> {
    write_csv(path, &TABLE_HEADER, rows.iter().map(|r| table_record(r, r.matches_print())))
}

/// Table 3: the last column flags a computed value that differs from print.
pub fn write_table3<P: AsRef<Path>>(path: P, rows: &[TableRow]) -> Result<()> {
    write_csv(path, &TABLE3_HEADER, rows.iter().map(|r| table_record(r, !r.matches_print())))
}

pub const FIGURE_HEADER: [&str; 4] = ["series", "sigma", "eta", "k"];

pub fn write_figure<P: AsRef<Path>>(path: P, points: &[CurvePoint]) -> Result<()> {
    write_csv(path, &FIGURE_HEADER, points.iter().map(|p| vec![p.series.to_string(), num(p.sigma), num(p.eta), num(p.k)]))
}

/// One named Monte Carlo estimate. `t` is infinite for ultimate ruin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub quantity: &'static str,
    pub u: f64,
    pub t: f64,
    pub estimate: McEstimate,
}

pub const ESTIMATE_HEADER: [&str; 8] = ["quantity", "u", "T", "mean", "stderr", "n_paths", "ci_low", "ci_high"];

pub fn write_estimates<P: AsRef<Path>>(path: P, rows: &[EstimateRow]) -> Result<()> {
    write_csv(
        path,
        &ESTIMATE_HEADER,
        rows.iter().map(|r| {
            let (lo, hi) = r.estimate.ci95();
            vec![
                r.quantity.to_string(),
                num(r.u),
                num(r.t),
                num(r.estimate.mean),
                num(r.estimate.stderr),
                r.estimate.n_paths.to_string(),
                num(lo),
                num(hi),
            ]
        }),
    )
}

/// `ψ̂(u, T)` at one discretization step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRow {
    pub step: f64,
    pub u: f64,
    pub t: f64,
    pub estimate: McEstimate,
}

pub const STEP_HEADER: [&str; 5] = ["step", "u", "T", "psi_T_hat", "stderr"];

pub fn write_step_table<P: AsRef<Path>>(path: P, rows: &[StepRow]) -> Result<()> {
    write_csv(
        path,
        &STEP_HEADER,
        rows.iter().map(|r| vec![num(r.step), num(r.u), num(r.t), num(r.estimate.mean), num(r.estimate.stderr)]),
    )
}

pub const PATH_HEADER: [&str; 4] = ["time", "value", "reflection", "ruined"];

pub fn write_path<P: AsRef<Path>>(path: P, sample: &PathSample) -> Result<()> {
    write_csv(
        path,
        &PATH_HEADER,
        sample.times.iter().zip(&sample.values).zip(&sample.reflection).map(|((&t, &v), &r)| {
            vec![num(t), num(v), num(r), flag(sample.ruined_at(t))]
        }),
    )
}

pub const DUALITY_HEADER: [&str; 9] =
    ["u", "T", "psi_T_hat", "psi_T_stderr", "dual_hat", "dual_stderr", "diff", "slack", "pass"];

pub fn write_duality<P: AsRef<Path>>(path: P, report: &DualityReport) -> Result<()> {
    write_csv(
        path,
        &DUALITY_HEADER,
        report.rows.iter().map(|r| {
            vec![
                num(r.u),
                num(r.t),
                num(r.finite.mean),
                num(r.finite.stderr),
                num(r.dual.mean),
                num(r.dual.stderr),
                num(r.diff),
                num(r.slack),
                flag(r.pass),
            ]
        }),
    )
}

pub const BOUND_HEADER: [&str; 8] = ["u", "T", "psi_hat", "psi_T_hat", "gap", "bound", "stderr", "pass"];

pub fn write_bound<P: AsRef<Path>>(path: P, report: &BoundReport) -> Result<()> {
    write_csv(
        path,
        &BOUND_HEADER,
        report.rows.iter().map(|r| {
            vec![
                num(report.u),
                num(r.t),
                num(report.psi.mean),
                num(r.psi_t.mean),
                num(r.gap),
                num(r.bound),
                num(r.stderr),
                flag(r.pass),
            ]
        }),
    )
}

/// Pretty-printed JSON followed by a newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<P: AsRef<Path>, T: Serialize>(path: P, value: &T) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    f.write_all(to_json(value)?.as_bytes())?;
    Ok(())
}
