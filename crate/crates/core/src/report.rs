//! CSV and markdown rendering of convergence reports.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{FemError, Result};
use crate::problem::Method;
use crate::study::{observed_rate, ConvergenceReport, ErrorValue};

pub const CSV_HEADER: &str =
    "method,dim,level,h,n_dof,err_r,rate_r,err_q,rate_q,err_p,rate_p,inv_p,inv_curl,inv_r2d,max_div";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "md" | "markdown" => Ok(ReportFormat::Markdown),
            other => Err(format!("unknown format '{other}' (expected csv or md)")),
        }
    }
}

/// One CSV row. Rates and invariants are `None` where they do not apply.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub dim: usize,
    pub level: usize,
    pub h: f64,
    pub n_dof: usize,
    pub err_r: f64,
    pub rate_r: Option<f64>,
    pub err_q: f64,
    pub rate_q: Option<f64>,
    pub err_p: f64,
    pub rate_p: Option<f64>,
    pub inv_p: Option<f64>,
    pub inv_curl: Option<f64>,
    pub inv_r2d: Option<f64>,
    pub max_div: f64,
}

/// Flattens a report into rows, grouped by method then level.
pub fn report_rows(report: &ConvergenceReport) -> Vec<ReportRow> {
    let mut rows = Vec::new();
    for &method in &report.config.methods {
        let mut prev: Option<(f64, [f64; 3])> = None;
        for level in &report.levels {
            let Some(m) = level.method(method) else {
                continue;
            };
            let errs = [m.err_r.value, m.err_q.value, m.err_p.value];
            let rate = |k: usize| prev.map(|(h0, e0)| observed_rate(e0[k], errs[k], h0, level.h));
            let inv = level.invariants.as_ref();
            rows.push(ReportRow {
                method: method.label().to_string(),
                dim: report.config.dim,
                level: level.level,
                h: level.h,
                n_dof: m.n_dof,
                err_r: errs[0],
                rate_r: rate(0),
                err_q: errs[1],
                rate_q: rate(1),
                err_p: errs[2],
                rate_p: rate(2),
                inv_p: inv.map(|i| i.p_diff),
                inv_curl: inv.map(|i| i.curl_diff),
                inv_r2d: inv.and_then(|i| i.r_diff),
                max_div: m.max_div,
            });
            prev = Some((level.h, errs));
        }
    }
    rows
}

/// Scientific notation with 16 significant digits.
pub fn sci(v: f64) -> String {
    format!("{v:.15e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

pub fn to_csv(report: &ConvergenceReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in report_rows(report) {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.method,
            r.dim,
            r.level,
            sci(r.h),
            r.n_dof,
            sci(r.err_r),
            opt(r.rate_r),
            sci(r.err_q),
            opt(r.rate_q),
            sci(r.err_p),
            opt(r.rate_p),
            opt(r.inv_p),
            opt(r.inv_curl),
            opt(r.inv_r2d),
            sci(r.max_div)
        );
    }
    s
}

/// Parses CSV produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let bad = |msg: String| FemError::InvalidConfig(format!("malformed report: {msg}"));
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => return Err(bad(format!("header {other:?}"))),
    }
    let num = |s: &str| -> Result<f64> { s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}"))) };
    let int =
        |s: &str| -> Result<usize> { s.parse::<usize>().map_err(|e| bad(format!("{s:?}: {e}"))) };
    let optnum = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s).map(Some)
        }
    };
    let mut rows = Vec::new();
    for line in lines.filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 15 {
            return Err(bad(format!("{} fields in {line:?}", f.len())));
        }
        rows.push(ReportRow {
            method: f[0].to_string(),
            dim: int(f[1])?,
            level: int(f[2])?,
            h: num(f[3])?,
            n_dof: int(f[4])?,
            err_r: num(f[5])?,
            rate_r: optnum(f[6])?,
            err_q: num(f[7])?,
            rate_q: optnum(f[8])?,
            err_p: num(f[9])?,
            rate_p: optnum(f[10])?,
            inv_p: optnum(f[11])?,
            inv_curl: optnum(f[12])?,
            inv_r2d: optnum(f[13])?,
            max_div: num(f[14])?,
        });
    }
    Ok(rows)
}

fn md_err(e: ErrorValue) -> String {
    if e.relative {
        format!("{:.2e}", e.value)
    } else {
        format!("{:.2e}*", e.value)
    }
}

fn md_rate(r: Option<f64>) -> String {
    r.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into())
}

/// Markdown report: a configuration preamble, then one table with a shared
/// `h` column and a block of `N_dof, error, rate` columns per method.
pub fn to_markdown(report: &ConvergenceReport) -> String {
    let c = &report.config;
    let t = &c.tolerances;
    let mut s = String::new();
    let methods: Vec<&str> = c.methods.iter().map(|m| m.label()).collect();
    let _ = writeln!(s, "# Convergence study ({}D)\n", c.dim);
    let _ = writeln!(
        s,
        "- base resolution {}, {} levels, methods {}, mu = {}",
        c.base,
        c.levels,
        methods.join(", "),
        c.mu
    );
    let _ = writeln!(
        s,
        "- solver tolerance {:e}; invariant tolerance {:e} (relative); cellwise div q_h tolerance {:e}",
        c.tol, t.invariant, t.max_div
    );
    if c.perturb_pressure {
        let _ = writeln!(
            s,
            "- gradient perturbation: ‖dq‖, ‖dr‖ <= {:e}, ‖dp‖ > {:e}",
            t.robust_delta, t.robust_min_p
        );
    }
    let _ = writeln!(
        s,
        "- errors are relative L2 errors; `*` marks absolute errors\n"
    );

    let rows = report_rows(report);
    let _ = write!(s, "| h |");
    for &method in &c.methods {
        let _ = write!(
            s,
            " N_dof ({0}) | Error_r | Rate_r | Error_q | Rate_q | Error_p | Rate_p |",
            method.label()
        );
    }
    s.push('\n');
    let _ = writeln!(s, "|---|{}", "---|".repeat(7 * c.methods.len()));
    for level in &report.levels {
        let _ = write!(s, "| {:.2e} |", level.h);
        for &method in &c.methods {
            let row = rows
                .iter()
                .find(|r| r.method == method.label() && r.level == level.level);
            match (level.method(method), row) {
                (Some(m), Some(row)) => {
                    let _ = write!(
                        s,
                        " {} | {} | {} | {} | {} | {} | {} |",
                        row.n_dof,
                        md_err(m.err_r),
                        md_rate(row.rate_r),
                        md_err(m.err_q),
                        md_rate(row.rate_q),
                        md_err(m.err_p),
                        md_rate(row.rate_p)
                    );
                }
                _ => s.push_str(&" - |".repeat(7)),
            }
        }
        s.push('\n');
    }
    s.push('\n');

    if report.levels.iter().any(|l| l.invariants.is_some()) {
        let _ = writeln!(s, "## Invariants (3F vs MV)\n");
        let _ = writeln!(
            s,
            "| level | h | ‖p^ - p_h‖ | ‖curl(r^ - r_h)‖ | ‖r^ - r_h‖ | max div q^ | max div q_h |"
        );
        let _ = writeln!(s, "|---|---|---|---|---|---|---|");
        for l in &report.levels {
            if let Some(i) = &l.invariants {
                let _ = writeln!(
                    s,
                    "| {} | {:.2e} | {:.2e} | {:.2e} | {} | {:.2e} | {:.2e} |",
                    l.level,
                    l.h,
                    i.p_diff,
                    i.curl_diff,
                    i.r_diff
                        .map(|v| format!("{v:.2e}"))
                        .unwrap_or_else(|| "-".into()),
                    i.max_div_3f,
                    i.max_div_mv
                );
            }
        }
        s.push('\n');
    }

    if c.perturb_pressure {
        let _ = writeln!(s, "## Gradient perturbation\n");
        let _ = writeln!(s, "| method | level | ‖dq‖ | ‖dr‖ | ‖dp‖ |");
        let _ = writeln!(s, "|---|---|---|---|---|");
        for &method in &c.methods {
            for l in &report.levels {
                if let Some(p) = l.method(method).and_then(|m| m.perturbation) {
                    let _ = writeln!(
                        s,
                        "| {} | {} | {:.2e} | {:.2e} | {:.2e} |",
                        method.label(),
                        l.level,
                        p.q_delta,
                        p.r_delta,
                        p.p_delta
                    );
                }
            }
        }
        s.push('\n');
    }
    s
}

pub fn render(report: &ConvergenceReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => to_csv(report),
        ReportFormat::Markdown => to_markdown(report),
    }
}

/// Writes the report to `path`.
pub fn emit_report(report: &ConvergenceReport, format: ReportFormat, path: &Path) -> Result<()> {
    std::fs::write(path, render(report, format)).map_err(|e| FemError::io(path, e))
}

/// Rows of one method.
pub fn method_rows(rows: &[ReportRow], method: Method) -> Vec<&ReportRow> {
    rows.iter().filter(|r| r.method == method.label()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::study::StudyConfig;

    #[test]
    fn empty_report_is_header_only() {
        let report = ConvergenceReport {
            config: StudyConfig::new(2, 2, 0),
            levels: vec![],
        };
        assert_eq!(to_csv(&report), format!("{CSV_HEADER}\n"));
        assert!(parse_csv(&to_csv(&report)).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_header() {
        assert!(parse_csv("a,b\n").is_err());
    }

    #[test]
    fn format_names() {
        assert_eq!(
            "md".parse::<ReportFormat>().unwrap(),
            ReportFormat::Markdown
        );
        assert_eq!("CSV".parse::<ReportFormat>().unwrap(), ReportFormat::Csv);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}
