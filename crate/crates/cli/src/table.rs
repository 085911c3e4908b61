//! `x_m,y_m,abs_p,phase_deg` tables.

use std::fs::File;
use std::path::Path;

use farfield_core::linear::MagnitudeProfile;
use farfield_core::{Complex64, Point3};

use crate::error::{CliError, Result};

pub const HEADER: [&str; 4] = ["x_m", "y_m", "abs_p", "phase_deg"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub abs_p: f64,
    /// NaN when only magnitudes are known.
    pub phase_deg: f64,
}

impl Row {
    pub fn complex(point: Point3, p: Complex64) -> Self {
        Self {
            x: point.x,
            y: point.y,
            abs_p: p.norm(),
            phase_deg: p.arg().to_degrees(),
        }
    }

    pub fn magnitude(x: f64, y: f64, abs_p: f64) -> Self {
        Self {
            x,
            y,
            abs_p,
            phase_deg: f64::NAN,
        }
    }
}

pub fn from_profile(profile: &MagnitudeProfile, y: f64) -> Vec<Row> {
    profile
        .x
        .iter()
        .zip(&profile.magnitude)
        .map(|(&x, &m)| Row::magnitude(x, y, m))
        .collect()
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v:.16e}")
    }
}

pub fn write_rows(
    path: &Path,
    leading: Option<&str>,
    rows: impl IntoIterator<Item = (Option<String>, Row)>,
) -> Result<()> {
    let mut out = csv::Writer::from_writer(File::create(path)?);
    let mut header: Vec<&str> = leading.into_iter().collect();
    header.extend(HEADER);
    out.write_record(&header)?;
    for (lead, row) in rows {
        let mut record: Vec<String> = lead.into_iter().collect();
        record.extend([fmt(row.x), fmt(row.y), fmt(row.abs_p), fmt(row.phase_deg)]);
        out.write_record(&record)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_table(path: &Path, rows: &[Row]) -> Result<()> {
    write_rows(path, None, rows.iter().map(|r| (None, *r)))
}

pub fn read_table(path: &Path) -> Result<Vec<Row>> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != HEADER {
        return Err(CliError::Parse(format!(
            "{}: expected header {}, found {}",
            path.display(),
            HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let value = |c: usize| -> Result<f64> {
            let field = record.get(c).unwrap_or("");
            field.trim().parse::<f64>().map_err(|_| {
                CliError::Parse(format!(
                    "{} line {}: '{field}' in column {} is not a number",
                    path.display(),
                    i + 2,
                    HEADER[c]
                ))
            })
        };
        rows.push(Row {
            x: value(0)?,
            y: value(1)?,
            abs_p: value(2)?,
            phase_deg: value(3)?,
        });
    }
    Ok(rows)
}
