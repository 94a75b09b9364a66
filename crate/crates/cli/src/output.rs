use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Destination for a command's main output: a file, or stdout.
pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(io::BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_error(p, e))?;
            }
            let f = File::create(p).map_err(|e| io_error(p, e))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
    }
}

pub fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("cannot write {}: {e}", path.display()))
}

/// `out` with `_suffix` inserted before the extension.
pub fn with_suffix(out: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| ext.to_string());
    out.with_file_name(format!("{stem}_{suffix}.{ext}"))
}

pub fn csv_writer(w: Box<dyn Write>) -> csv::Writer<Box<dyn Write>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

pub fn write_csv<I, R>(w: Box<dyn Write>, header: &[&str], rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut csv = csv_writer(w);
    let wrap = |e: csv::Error| CliError::Io(format!("CSV output failed: {e}"));
    csv.write_record(header).map_err(wrap)?;
    for row in rows {
        csv.write_record(row).map_err(wrap)?;
    }
    csv.flush().map_err(|e| CliError::Io(format!("CSV output failed: {e}")))
}

pub fn write_json<T: Serialize>(mut w: Box<dyn Write>, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(format!("JSON output failed: {e}")))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Io(format!("JSON output failed: {e}")))
}

/// Shortest representation that round-trips; `.` decimal separator always.
pub fn num(x: f64) -> String {
    // Negative zero prints as "-0"; write it as plain 0.
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x}")
}
