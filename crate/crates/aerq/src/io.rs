//! CSV ingestion and emission.
//!
//! The format is a UTF-8 header `y,x1,…,xp` followed by numeric rows.
//! Values are written in shortest round-trip decimal form, so a dataset
//! survives a write/read cycle bit-exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::data::Dataset;
use crate::{Error, Result};

/// Reads a dataset from a CSV file and validates it.
pub fn load_csv<P: AsRef<Path>>(path: P) -> Result<Dataset> {
    read_dataset(File::open(path)?)
}

/// Reads a dataset from any reader.
pub fn read_dataset<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| Error::Csv {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.is_empty() || &headers[0] != "y" {
        return Err(Error::MissingColumn("y".into()));
    }
    let p = headers.len() - 1;
    for j in 0..p {
        let expected = format!("x{}", j + 1);
        if &headers[j + 1] != expected.as_str() {
            return Err(Error::MissingColumn(expected));
        }
    }

    let mut y = Vec::new();
    let mut x_rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv {
            line: e
                .position()
                .map(|pos| pos.line())
                .unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|pos| pos.line()).unwrap_or(0);
        if record.len() != p + 1 {
            return Err(Error::Csv {
                line,
                message: format!("expected {} fields, found {}", p + 1, record.len()),
            });
        }
        let parse = |field: &str, name: &str| -> Result<f64> {
            field.parse::<f64>().map_err(|_| Error::Csv {
                line,
                message: format!("column '{}': cannot parse '{}' as a number", name, field),
            })
        };
        y.push(parse(&record[0], "y")?);
        let mut row = Vec::with_capacity(p);
        for j in 0..p {
            row.push(parse(&record[j + 1], &format!("x{}", j + 1))?);
        }
        x_rows.push(row);
    }
    Dataset::new(y, &x_rows)
}

/// Writes a dataset as CSV (LF line endings, shortest round-trip numbers).
pub fn write_csv<P: AsRef<Path>>(path: P, data: &Dataset) -> Result<()> {
    write_dataset(File::create(path)?, data)
}

/// Writes a dataset to any writer.
pub fn write_dataset<W: Write>(mut writer: W, data: &Dataset) -> Result<()> {
    let mut header = String::from("y");
    for j in 0..data.p() {
        header.push_str(&format!(",x{}", j + 1));
    }
    writeln!(writer, "{}", header)?;
    for i in 0..data.n() {
        let mut line = format!("{}", data.y()[i]);
        for v in data.row(i) {
            line.push_str(&format!(",{}", v));
        }
        writeln!(writer, "{}", line)?;
    }
    Ok(())
}
