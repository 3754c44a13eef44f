//! File formats: CSV for numeric tables, JSON sidecars for metadata.
//!
//! Numeric payloads are written with a fixed 17-significant-digit
//! scientific format so that replaying a persisted configuration
//! reproduces byte-identical files. Tabular CSVs carry one header line;
//! grid CSVs (Husimi, tomography) are bare matrices so a `G × G` scan
//! yields exactly G rows of G columns.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

/// Canonical float formatting: 17 significant digits, scientific.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)
            .map_err(|e| Error::io(format!("creating {}", parent.display()), e))?;
    }
    let file =
        fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))?;
    Ok(BufWriter::new(file))
}

/// Writes a two-column series CSV with header `t,F`.
pub fn write_series_csv(path: &Path, values: &[f64]) -> Result<()> {
    let mut w = create(path)?;
    let io_err = |e| Error::io(format!("writing {}", path.display()), e);
    writeln!(w, "t,F").map_err(io_err)?;
    for (t, v) in values.iter().enumerate() {
        writeln!(w, "{t},{}", fmt_f64(*v)).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes a generic one-header-line table CSV.
pub fn write_table_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut w = create(path)?;
    let io_err = |e| Error::io(format!("writing {}", path.display()), e);
    writeln!(w, "{header}").map_err(io_err)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes a bare matrix CSV: one row per line, no header.
pub fn write_matrix_csv(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut w = create(path)?;
    let io_err = |e| Error::io(format!("writing {}", path.display()), e);
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| fmt_f64(*v)).collect();
        writeln!(w, "{}", line.join(",")).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Writes a pretty-printed JSON metadata sidecar.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Reads a signal from CSV: numbers from the last column, a leading
/// header line and empty lines skipped. Accepts both bare one-column
/// files and `t,value` tables.
pub fn read_signal_csv(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let last = line.rsplit(',').next().unwrap().trim();
        match last.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if lineno == 0 => continue, // header
            Err(_) => {
                return Err(Error::Config(format!(
                    "{}:{}: cannot parse '{last}' as a number",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Config(format!(
            "{}: no numeric rows found",
            path.display()
        )));
    }
    Ok(values)
}

/// Output directory resolution: explicit flag, else `SAWFID_OUTDIR`,
/// else the current directory.
pub fn resolve_out_dir(flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Ok(env) = std::env::var("SAWFID_OUTDIR") {
        if !env.is_empty() {
            return PathBuf::from(env);
        }
    }
    PathBuf::from(".")
}
