use std::io::Write;
use std::path::Path;

use convbound::DenseMatrix;

use crate::{invalid, CliError};

/// Full-precision scientific notation (17 significant digits).
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn finish<W: Write>(w: csv::Writer<W>) -> Result<(), CliError> {
    w.into_inner().map_err(|e| invalid(e.error()))?.flush().map_err(invalid)
}

fn reader(path: &Path, headers: bool) -> Result<csv::Reader<std::fs::File>, CliError> {
    csv::ReaderBuilder::new()
        .has_headers(headers)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn parse_f64(path: &Path, line: u64, field: &str) -> Result<f64, CliError> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(format!("{}:{line}: not a finite number: {field:?}", path.display())))
}

/// One example per row, returned as a `features x examples` matrix.
pub fn read_examples(path: &Path, features: usize) -> Result<DenseMatrix, CliError> {
    let mut rdr = reader(path, false)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != features {
            return Err(invalid(format!(
                "{}:{line}: {} values, network expects {features}",
                path.display(),
                rec.len()
            )));
        }
        rows.push(rec.iter().map(|f| parse_f64(path, line, f)).collect::<Result<_, _>>()?);
    }
    if rows.is_empty() {
        return Err(invalid(format!("{}: no examples", path.display())));
    }
    DenseMatrix::from_fn(features, rows.len(), |i, p| rows[p][i]).map_err(invalid)
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|_| {
                invalid(format!(
                    "{}:{}: not a class label: {:?}",
                    path.display(),
                    i + 1,
                    l.trim()
                ))
            })
        })
        .collect()
}

/// A bare number, or a CSV with a `ramp_risk` column (first data row).
pub fn read_risk(path: &Path) -> Result<f64, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let risk = match text.trim().parse::<f64>() {
        Ok(v) => v,
        Err(_) => {
            let mut rdr = reader(path, true)?;
            let headers = rdr.headers().map_err(invalid)?.clone();
            let col = headers
                .iter()
                .position(|h| h == "ramp_risk")
                .ok_or_else(|| invalid(format!("{}: no ramp_risk column", path.display())))?;
            let rec = rdr
                .records()
                .next()
                .ok_or_else(|| invalid(format!("{}: no data row", path.display())))?
                .map_err(invalid)?;
            let line = rec.position().map_or(0, |p| p.line());
            parse_f64(path, line, rec.get(col).unwrap_or(""))?
        }
    };
    if !(0.0..=1.0).contains(&risk) {
        return Err(invalid(format!(
            "{}: empirical risk {risk} outside [0, 1]",
            path.display()
        )));
    }
    Ok(risk)
}
