//! Dataset CSV: one forward experiment per row.
//!
//! ```text
//! depolarizing,gate,reset,readout,distance,rounds,logical_error_rate
//! 1.2345678901234567e-4,...,5,7,3.1622776601683794e-6
//! ```
//!
//! Rates are written in scientific notation with 17 significant digits, so
//! a written file parses back to bit-identical values.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use crate::domain::{CodeParams, DatasetRecord, NoiseProfile};
use crate::error::{Error, Result};

pub const HEADER: [&str; 7] = [
    "depolarizing",
    "gate",
    "reset",
    "readout",
    "distance",
    "rounds",
    "logical_error_rate",
];

pub fn write_records<W: Write>(out: W, records: &[DatasetRecord]) -> io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "{}", HEADER.join(","))?;
    for r in records {
        let p = r.noise;
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{},{},{:.16e}",
            p.depolarizing,
            p.gate,
            p.reset,
            p.readout,
            r.params.distance,
            r.params.rounds,
            r.logical_error_rate
        )?;
    }
    w.flush()
}

pub fn save_records(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(file, records).map_err(|e| Error::io(path, e))
}

fn malformed(row: u64, column: &str, reason: impl Into<String>) -> Error {
    Error::MalformedCsv {
        row,
        column: column.to_string(),
        reason: reason.into(),
    }
}

/// Parses a dataset. Rows are numbered from 1 for the header line.
pub fn read_records<R: Read>(input: R) -> Result<Vec<DatasetRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(input);
    let mut rows = rdr.records();

    let header = match rows.next() {
        Some(h) => h.map_err(|e| malformed(1, "header", e.to_string()))?,
        None => return Err(malformed(1, "header", "file is empty")),
    };
    if header.iter().map(str::trim).ne(HEADER) {
        return Err(malformed(
            1,
            "header",
            format!("expected `{}`", HEADER.join(",")),
        ));
    }

    let mut out = Vec::new();
    for (i, row) in rows.enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| malformed(line, "*", e.to_string()))?;
        if row.len() != HEADER.len() {
            return Err(malformed(
                line,
                "*",
                format!("expected {} fields, got {}", HEADER.len(), row.len()),
            ));
        }
        let float = |c: usize| -> Result<f64> {
            let v: f64 = row[c].trim().parse().map_err(|_| {
                malformed(line, HEADER[c], format!("`{}` is not a number", &row[c]))
            })?;
            if !v.is_finite() {
                return Err(malformed(line, HEADER[c], "must be finite"));
            }
            Ok(v)
        };
        let int = |c: usize| -> Result<u32> {
            row[c].trim().parse().map_err(|_| {
                malformed(
                    line,
                    HEADER[c],
                    format!("`{}` is not a non-negative integer", &row[c]),
                )
            })
        };
        let noise = NoiseProfile {
            depolarizing: float(0)?,
            gate: float(1)?,
            reset: float(2)?,
            readout: float(3)?,
        };
        let params = CodeParams {
            distance: int(4)?,
            rounds: int(5)?,
        };
        let rec = DatasetRecord::new(noise, params, float(6)?).map_err(|e| {
            let column = match &e {
                Error::InvalidInput { field, .. } => field.to_string(),
                _ => "*".to_string(),
            };
            malformed(line, &column, e.to_string())
        })?;
        out.push(rec);
    }
    Ok(out)
}

pub fn load_records(path: &Path) -> Result<Vec<DatasetRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file)
}
