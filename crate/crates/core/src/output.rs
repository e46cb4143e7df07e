//! Trajectory CSV, report JSON and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::actions::Value;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::lie::{CMatrix, C64};
use crate::scenario::CompareRow;
use crate::verify::{CheckEntry, Finding, VerificationReport};

pub const TOOL: &str = "lsb-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits: enough to reproduce every `f64` exactly.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn push_scalar(header: &mut Vec<String>, name: &str, complex: bool) {
    if complex {
        header.push(format!("{name}_re"));
        header.push(format!("{name}_im"));
    } else {
        header.push(name.to_string());
    }
}

fn push_scalar_value(row: &mut Vec<String>, z: C64, complex: bool) {
    row.push(num(z.re));
    if complex {
        row.push(num(z.im));
    }
}

fn matrix_columns(header: &mut Vec<String>, name: &str, m: &CMatrix, complex: bool) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            push_scalar(header, &format!("{name}_{i}{j}"), complex);
        }
    }
}

fn matrix_values(row: &mut Vec<String>, m: &CMatrix, complex: bool) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            push_scalar_value(row, m[(i, j)], complex);
        }
    }
}

fn value_columns(header: &mut Vec<String>, name: &str, v: &Value, complex: bool) {
    match v {
        Value::Scalar(_) => push_scalar(header, name, complex),
        Value::Matrix(m) => matrix_columns(header, name, m, complex),
    }
}

fn value_values(row: &mut Vec<String>, v: &Value, complex: bool) {
    match v {
        Value::Scalar(z) => push_scalar_value(row, *z, complex),
        Value::Matrix(m) => matrix_values(row, m, complex),
    }
}

/// Header `t, xi_*, g_ij, x*, p*` followed by one row per sample. Columns
/// are present when the first sample carries the field; complex groups
/// split every entry into `_re` and `_im`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let group = traj.group();
    let complex = group.is_complex();
    let mut header = vec!["t".to_string()];
    let Some(first) = traj.samples().first() else {
        return "t\n".into();
    };
    if first.xi.is_some() {
        for label in group.component_labels() {
            push_scalar(&mut header, &format!("xi_{label}"), complex);
        }
    }
    if let Some(g) = &first.g {
        matrix_columns(&mut header, "g", g.matrix(), complex);
    }
    if let Some(x) = &first.x {
        value_columns(&mut header, "x", x, complex);
    }
    if let Some(p) = &first.p {
        value_columns(&mut header, "p", p, complex);
    }
    let mut out = header.join(",");
    out.push('\n');
    for (t, s) in traj.times().iter().zip(traj.samples()) {
        let mut row = vec![num(*t)];
        if let Some(xi) = &s.xi {
            for z in xi.coeffs() {
                push_scalar_value(&mut row, *z, complex);
            }
        }
        if let Some(g) = &s.g {
            matrix_values(&mut row, g.matrix(), complex);
        }
        if let Some(x) = &s.x {
            value_values(&mut row, x, complex);
        }
        if let Some(p) = &s.p {
            value_values(&mut row, p, complex);
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Reads back a numeric CSV written by this module.
pub fn parse_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Domain("empty CSV".into()))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Domain(format!("CSV row {}: {e}", i + 1)))?;
            if row.len() != header.len() {
                return Err(Error::Domain(format!("CSV row {} has {} fields", i + 1, row.len())));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

pub fn compare_csv(rows: &[CompareRow], complex: bool) -> String {
    let mut header = vec!["t".to_string()];
    for name in ["x_numeric", "x_closed", "p_numeric", "p_closed"] {
        push_scalar(&mut header, name, complex);
    }
    header.push("gap".into());
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let mut row = vec![num(r.t)];
        for z in [r.x_numeric, r.x_closed, r.p_numeric, r.p_closed] {
            push_scalar_value(&mut row, z, complex);
        }
        row.push(num(r.gap()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    tool: &'static str,
    version: &'static str,
    scenario_digest: Option<&'a str>,
    passed: bool,
    checks: &'a [CheckEntry],
    findings: &'a [Finding],
}

/// Pretty JSON with tool name and version. Non-finite residuals are
/// written as `null`.
pub fn report_json(report: &VerificationReport) -> String {
    let doc = ReportDocument {
        tool: TOOL,
        version: VERSION,
        scenario_digest: report.scenario_digest.as_deref(),
        passed: report.passed(),
        checks: &report.checks,
        findings: &report.findings,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
