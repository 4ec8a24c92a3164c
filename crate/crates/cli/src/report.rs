//! CSV output. Floats are written with 17 significant digits so that every
//! value round-trips exactly.

use std::path::Path;

use crate::Failure;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `header` and `rows` to `path`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
