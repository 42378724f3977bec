//! CSV formats shared by the library and the command-line tool. Headers are
//! part of a versioned schema; numbers use shortest round-trip formatting.

use crate::om::{PathError, PathGrid};
use std::io::{Read, Write};

pub const SCHEMA_VERSION: u32 = 1;

pub const PATH_HEADER: &str = "t,z,zdot";
pub const SAMPLE_HEADER: &str = "t,x";
pub const SWEEP_D_HEADER: &str = "d,outcome";
pub const RASTER_HEADER: &str = "alpha,beta,solvable";

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("expected columns starting with `t,z` (or `t,x`), found `{0}`")]
    Header(String),
    #[error("row {row}: cannot parse `{text}` as a number")]
    Number { row: usize, text: String },
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Writes `t,z,zdot` rows.
pub fn write_path_csv<W: Write>(mut w: W, t: &[f64], z: &[f64], zdot: &[f64]) -> std::io::Result<()> {
    writeln!(w, "{PATH_HEADER}")?;
    for i in 0..t.len() {
        writeln!(w, "{},{},{}", t[i], z[i], zdot[i])?;
    }
    w.flush()
}

/// Writes `t,x` rows for a simulated or sampled path.
pub fn write_sample_csv<W: Write>(mut w: W, grid: &PathGrid) -> std::io::Result<()> {
    writeln!(w, "{SAMPLE_HEADER}")?;
    for (i, v) in grid.values().iter().enumerate() {
        writeln!(w, "{},{}", grid.t(i), v)?;
    }
    w.flush()
}

/// Second-order finite-difference velocities (one-sided at the ends).
pub fn grid_velocity(grid: &PathGrid) -> Vec<f64> {
    let z = grid.values();
    let n = grid.n();
    let dt = grid.dt();
    (0..=n)
        .map(|i| {
            if i == 0 {
                (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * dt)
            } else if i == n {
                (3.0 * z[n] - 4.0 * z[n - 1] + z[n - 2]) / (2.0 * dt)
            } else {
                (z[i + 1] - z[i - 1]) / (2.0 * dt)
            }
        })
        .collect()
}

/// Reads a path from a CSV whose first two columns are time and value; any
/// further columns are ignored. Times must be uniformly spaced.
pub fn read_path_csv<R: Read>(r: R) -> Result<PathGrid, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let ok = headers.len() >= 2 && &headers[0] == "t" && (&headers[1] == "z" || &headers[1] == "x");
    if !ok {
        return Err(CsvError::Header(headers.iter().collect::<Vec<_>>().join(",")));
    }
    let mut samples = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |k: usize| -> Result<f64, CsvError> {
            let text = rec.get(k).unwrap_or("");
            text.parse().map_err(|_| CsvError::Number { row: row + 1, text: text.to_string() })
        };
        samples.push((num(0)?, num(1)?));
    }
    Ok(PathGrid::from_samples(&samples)?)
}
