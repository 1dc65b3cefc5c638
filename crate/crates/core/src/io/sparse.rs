//! Sparse measurement CSV: header `row,col,disparity`, one entry per line.
//!
//! Bounds are not checked here because the frame size is unknown at parse
//! time; [`crate::SparseMeasurement::new`] does that at the use site.

use std::collections::HashMap;
use std::path::Path;

use super::depth::csv_error;
use super::{read_all, write_atomic};
use crate::densify::SparseEntry;
use crate::error::{Error, Result};

pub const SPARSE_HEADER: &str = "row,col,disparity";

pub fn read_sparse(path: impl AsRef<Path>) -> Result<Vec<SparseEntry>> {
    let path = path.as_ref();
    let bytes = read_all(path)?;
    if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Ok(Vec::new());
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| csv_error(path, e))?;
    let names: Vec<&str> = header.iter().collect();
    if names != ["row", "col", "disparity"] {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: format!("expected header {SPARSE_HEADER:?}, found {:?}", names.join(",")),
        });
    }
    let mut entries = Vec::new();
    let mut first_seen: HashMap<(usize, usize), u64> = HashMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let parse_err = |what: &str, field: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: format!("invalid {what}: {field:?}"),
        };
        let row: usize = record[0].parse().map_err(|_| parse_err("row", &record[0]))?;
        let col: usize = record[1].parse().map_err(|_| parse_err("col", &record[1]))?;
        let disparity: f64 = record[2]
            .parse()
            .map_err(|_| parse_err("disparity", &record[2]))?;
        if !(disparity.is_finite() && disparity >= 0.0) {
            return Err(parse_err("disparity", &record[2]));
        }
        if let Some(&first_line) = first_seen.get(&(row, col)) {
            return Err(Error::DuplicateCoordinate {
                path: path.to_path_buf(),
                row,
                col,
                first_line,
                second_line: line,
            });
        }
        first_seen.insert((row, col), line);
        entries.push(SparseEntry::new(row, col, disparity));
    }
    Ok(entries)
}

/// Writes entries with round-tripping decimal disparities.
pub fn write_sparse(entries: &[SparseEntry], path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), |w| {
        writeln!(w, "{SPARSE_HEADER}")?;
        for e in entries {
            writeln!(w, "{},{},{}", e.row, e.col, e.disparity)?;
        }
        Ok(())
    })
}
