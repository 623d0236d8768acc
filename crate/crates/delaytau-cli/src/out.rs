//! Deterministic artifact formatting and output.
//!
//! Every float printed into a CSV goes through [`sig17`], which renders
//! 17 significant digits in scientific notation with a `.` decimal
//! separator. Identical invocations therefore produce byte-identical
//! artifacts; lines always end with `\n`.

use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Render a float with 17 significant digits, or the literal tokens
/// `nan`, `inf`, `-inf` for non-finite values.
pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

/// Write the artifact to the path, or to stdout when no path is given.
pub fn write_artifact(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            })
        }
    }
}
