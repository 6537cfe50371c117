//! Matrices as CSV: one row per line, 17 significant digits, optional
//! `# rows cols` header.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

pub fn format_matrix_csv(m: &DenseMatrix) -> String {
    let mut out = format!("# {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix_csv(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_matrix_csv(m).as_bytes())?;
    Ok(())
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let text = fs::read_to_string(path)?;
    parse_matrix_csv(&text)
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = line.trim_start_matches('#').split_whitespace().collect();
    let dims: Option<Vec<usize>> = parts.iter().map(|p| p.parse().ok()).collect();
    match dims.as_deref() {
        Some([r, c]) => Ok((*r, *c)),
        _ => Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("header must read `# rows cols`, got `{line}`"),
        }),
    }
}

pub fn parse_matrix_csv(text: &str) -> Result<DenseMatrix> {
    let mut header = None;
    let mut body_start = 0usize;
    let mut skipped_lines = 0usize;
    if let Some(first) = text.lines().next() {
        if first.trim_start().starts_with('#') {
            header = Some(parse_header(first)?);
            body_start = first.len() + 1;
            skipped_lines = 1;
        }
    }
    let body = text.get(body_start..).unwrap_or("");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());

    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize) + skipped_lines,
            column: 0,
            message: e.to_string(),
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize) + skipped_lines;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match cols {
            None => cols = Some(record.len()),
            Some(c) if c != record.len() => {
                return Err(Error::Parse {
                    line,
                    column: record.len().min(c) + 1,
                    message: format!("row {} has {} fields, expected {c}", rows + 1, record.len()),
                })
            }
            _ => {}
        }
        for (k, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                line,
                column: k + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    column: k + 1,
                    message: "non-finite value".into(),
                });
            }
            data.push(v);
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 {
        return Err(Error::Parse {
            line: skipped_lines + 1,
            column: 1,
            message: "no data rows".into(),
        });
    }
    if let Some((r, c)) = header {
        if (r, c) != (rows, cols) {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("header says {r}x{c}, data is {rows}x{cols}"),
            });
        }
    }
    DenseMatrix::new(rows, cols, data)
}
