//! CSV input and output.

use std::io::Write;
use std::path::Path;

use distkern::{PairedSample, SampleMatrix};

use crate::error::{CliError, CliResult};

/// A loaded data file: a plain sample, or a paired sample split at a column.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Sample(SampleMatrix<f64>),
    Paired(PairedSample<f64>),
}

impl Loaded {
    pub fn into_sample(self) -> SampleMatrix<f64> {
        match self {
            Self::Sample(s) => s,
            Self::Paired(p) => p.joint(),
        }
    }
}

/// Reads a numeric CSV file, one observation per row. A first row that does
/// not parse as numbers is taken as a header. With `split`, columns
/// `[0, split)` become `x` and the rest `y`.
pub fn load_csv(path: &Path, split: Option<usize>) -> CliResult<Loaded> {
    let fail = |message: String| CliError::Data {
        path: path.to_path_buf(),
        message,
    };
    if !path.is_file() {
        return Err(fail("file not found".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;

    let mut data = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0;
    for (index, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(index as u64 + 1, |p| p.line());
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: Vec<Result<f64, _>> = record.iter().map(str::parse::<f64>).collect();
        if index == 0 && parsed.iter().any(Result::is_err) {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(fail(format!(
                    "line {line} has {} fields, expected {w}",
                    record.len()
                )))
            }
            Some(_) => {}
        }
        for (col, (value, text)) in parsed.into_iter().zip(record.iter()).enumerate() {
            match value {
                Ok(v) if v.is_finite() => data.push(v),
                _ => {
                    return Err(fail(format!(
                        "line {line}, column {}: '{text}' is not a finite number",
                        col + 1
                    )))
                }
            }
        }
        rows += 1;
    }
    let Some(dim) = width.filter(|_| rows > 0) else {
        return Err(fail("no data rows".into()));
    };
    let sample = SampleMatrix::from_vec(rows, dim, data)?;
    match split {
        None => Ok(Loaded::Sample(sample)),
        Some(split) => Ok(Loaded::Paired(PairedSample::from_joint(&sample, split)?)),
    }
}

/// Writes rows with 17 significant digits, so reading them back is exact.
pub fn write_csv<W: Write>(out: W, header: &[String], rows: &[Vec<f64>]) -> CliResult<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
    }
    writer.flush()?;
    Ok(())
}

pub fn column_names(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

pub fn sample_rows(s: &SampleMatrix<f64>) -> Vec<Vec<f64>> {
    s.iter_rows().map(<[f64]>::to_vec).collect()
}
