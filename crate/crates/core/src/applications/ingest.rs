//! Trajectory ingestion: one row per time step, `d_Y` numeric columns.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Reads a trajectory from CSV. A first row that does not parse as numbers
/// is taken as a header; lines starting with `#` are skipped. Rows holding
/// NaN or non-numeric values are rejected with their line number.
pub fn read_trajectory_csv<R: Read>(reader: R) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0usize;
    let mut first = true;
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let row = match parsed {
            Ok(row) => row,
            Err(_) if first => {
                first = false;
                continue;
            }
            Err(e) => {
                return Err(Error::Ingest {
                    line,
                    message: format!("non-numeric field: {e}"),
                })
            }
        };
        first = false;
        if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::Ingest {
                line,
                message: format!("non-finite value in column {}", bad + 1),
            });
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Ingest {
                    line,
                    message: format!("expected {w} columns, found {}", row.len()),
                })
            }
            _ => {}
        }
        values.extend(row);
        rows += 1;
    }
    let width = match width {
        Some(w) if rows > 0 => w,
        _ => {
            return Err(Error::Ingest {
                line: 0,
                message: "no data rows".into(),
            })
        }
    };
    Ok(DMatrix::from_row_slice(rows, width, &values))
}

pub fn read_trajectory_file(path: &Path) -> Result<DMatrix<f64>> {
    read_trajectory_csv(std::fs::File::open(path)?)
}

/// Writes a trajectory as headerless CSV rows.
pub fn write_trajectory_csv<W: std::io::Write>(traj: &DMatrix<f64>, writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in traj.row_iter() {
        w.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    w.flush()?;
    Ok(())
}
