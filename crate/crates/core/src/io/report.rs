//! Evaluation report output: JSON summary and per-point CSV.

use std::path::Path;

use super::{read_all, write_atomic};
use crate::error::{Error, Result};
use crate::eval::{EvalReport, ReportSummary};

pub fn write_report(summary: &ReportSummary, path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| Error::invalid(e.to_string()))?;
    write_atomic(path.as_ref(), |w| {
        w.write_all(text.as_bytes())?;
        w.write_all(b"\n")
    })
}

pub fn read_report(path: impl AsRef<Path>) -> Result<ReportSummary> {
    let path = path.as_ref();
    let bytes = read_all(path)?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        reason: e.to_string(),
    })
}

/// `row,col,delta2d,delta3d,uncertainty,ref_depth`; uncertainty is left
/// empty when none was evaluated.
pub fn write_per_point_csv(report: &EvalReport, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), |w| {
        writeln!(w, "row,col,delta2d,delta3d,uncertainty,ref_depth")?;
        for r in &report.records {
            let unc = r.uncertainty.map(|u| u.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                r.row, r.col, r.delta2d, r.delta3d, unc, r.ref_depth
            )?;
        }
        Ok(())
    })
}
