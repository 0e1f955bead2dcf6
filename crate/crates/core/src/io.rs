//! Plain-text writers shared by the simulation and analysis modules.
//!
//! `.dat` files are whitespace-separated columns preceded by a `#` header
//! line, readable by gnuplot; CSV goes through the `csv` crate. Floats are
//! written as `{:.16e}` so values round-trip exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn check_columns(header: &[&str], columns: &[&[f64]]) -> io::Result<usize> {
    if header.len() != columns.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} header names for {} columns", header.len(), columns.len()),
        ));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "columns have different lengths"));
    }
    Ok(rows)
}

pub fn write_dat<W: Write>(mut out: W, header: &[&str], columns: &[&[f64]]) -> io::Result<()> {
    let rows = check_columns(header, columns)?;
    writeln!(out, "# {}", header.join(" "))?;
    for r in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| fmt_f64(c[r])).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()
}

pub fn write_dat_file(path: &Path, header: &[&str], columns: &[&[f64]]) -> io::Result<()> {
    write_dat(BufWriter::new(File::create(path)?), header, columns)
}

pub fn write_csv<W: Write>(out: W, header: &[&str], columns: &[&[f64]]) -> io::Result<()> {
    let rows = check_columns(header, columns)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| fmt_f64(c[r])))?;
    }
    w.flush()
}

pub fn write_csv_file(path: &Path, header: &[&str], columns: &[&[f64]]) -> io::Result<()> {
    write_csv(BufWriter::new(File::create(path)?), header, columns)
}

/// Reads whitespace-separated numeric columns, skipping `#` lines.
pub fn read_dat(text: &str) -> Result<Vec<Vec<f64>>, std::num::ParseFloatError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(str::parse).collect())
        .collect()
}
