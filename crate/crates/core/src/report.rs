//! Report serialization.
//!
//! CSV column orders are fixed so downstream tooling can rely on them:
//!
//! * norm scans: `domain,function,p,t,h,estimate,std_error,samples` with
//!   the height vector semicolon-joined inside the `h` column,
//! * disc checks: `seed,domain,max_residual,N_theta`,
//! * cone audits: `domain,case,h,status,residual`.
//!
//! JSON output is the full report structure, pretty-printed.  All float
//! rendering goes through the shortest round-trip formatter, so identical
//! inputs give byte-identical files.

use serde::Serialize;

use crate::hardy::{CorollaryReport, MonotonicityReport};

/// Canonical float rendering for CSV cells.  Extreme magnitudes switch to
/// exponent form so residuals near zero stay readable.
pub fn float_cell(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if v == 0.0 {
        "0".to_string()
    } else if v.abs() < 1e-4 || v.abs() >= 1e16 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Height vector as a single semicolon-joined CSV cell.
pub fn join_heights(h: &[f64]) -> String {
    h.iter().map(|v| float_cell(*v)).collect::<Vec<_>>().join(";")
}

pub const NORM_CSV_HEADER: &str = "domain,function,p,t,h,estimate,std_error,samples";
pub const DISC_CSV_HEADER: &str = "seed,domain,max_residual,N_theta";
pub const CONE_CSV_HEADER: &str = "domain,case,h,status,residual";

/// One scan as CSV, one row per grid point.
pub fn monotonicity_csv(domain: &str, report: &MonotonicityReport) -> String {
    let mut out = String::from(NORM_CSV_HEADER);
    out.push('\n');
    for (t, est) in report.ts.iter().zip(&report.estimates) {
        out.push_str(&format!(
            "{domain},{},{},{},{},{},{},{}\n",
            report.function,
            report.p,
            float_cell(*t),
            join_heights(&est.height),
            float_cell(est.value),
            float_cell(est.std_error),
            est.samples
        ));
    }
    out
}

/// Both legs of a supremum comparison as CSV rows in the norm layout,
/// with the scale multiple in the `t` column.
pub fn corollary_csv(domain: &str, report: &CorollaryReport) -> String {
    let mut out = String::from(NORM_CSV_HEADER);
    out.push('\n');
    let legs = report
        .to_zero_scales
        .iter()
        .zip(&report.to_zero_estimates)
        .chain(report.global_scales.iter().zip(&report.global_estimates));
    for (scale, est) in legs {
        out.push_str(&format!(
            "{domain},{},{},{},{},{},{},{}\n",
            report.function,
            report.p,
            float_cell(*scale),
            join_heights(&est.height),
            float_cell(est.value),
            float_cell(est.std_error),
            est.samples
        ));
    }
    out
}

/// One disc residual summary row.
#[derive(Clone, Debug, Serialize)]
pub struct DiscCheckRow {
    pub seed: u64,
    pub domain: String,
    pub max_residual: f64,
    pub n_theta: usize,
}

pub fn disc_csv(rows: &[DiscCheckRow]) -> String {
    let mut out = String::from(DISC_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.seed,
            row.domain,
            float_cell(row.max_residual),
            row.n_theta
        ));
    }
    out
}

/// One cone membership audit row.
#[derive(Clone, Debug, Serialize)]
pub struct ConeAuditRow {
    pub domain: String,
    pub case: String,
    pub h: Vec<f64>,
    pub status: String,
    pub residual: f64,
}

pub fn cone_csv(rows: &[ConeAuditRow]) -> String {
    let mut out = String::from(CONE_CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.domain,
            row.case,
            join_heights(&row.h),
            row.status,
            float_cell(row.residual)
        ));
    }
    out
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports are serializable");
    s.push('\n');
    s
}
