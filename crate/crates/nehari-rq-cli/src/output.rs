//! Atomic file outputs and deterministic JSON.
//!
//! JSON floats are printed with 17 significant digits so identical runs
//! produce byte-identical artifacts; non-finite values become null. Files
//! are staged next to their final name and renamed into place, so an
//! interrupted run never leaves a partial file under the final name.

use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::Path;

struct SigDigits17;

impl serde_json::ser::Formatter for SigDigits17 {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serialize with fixed float formatting and a trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigits17);
    value.serialize(&mut ser).context("serializing JSON")?;
    out.push(b'\n');
    Ok(out)
}

/// Write bytes to `path` atomically (stage + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    let mut staged = path.as_os_str().to_owned();
    staged.push(format!(".tmp{}", std::process::id()));
    let staged = std::path::PathBuf::from(staged);
    {
        let mut f = std::fs::File::create(&staged)
            .with_context(|| format!("creating {}", staged.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&staged, path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// Fixed 17-significant-digit float field for CSV cells.
pub fn csv_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        String::new()
    }
}
