//! Report envelopes and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use serde::Serialize;
use serde_json::Value;

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub schema_version: &'a str,
    pub command: &'a str,
    pub seed: u64,
    pub timestamp: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
}

#[derive(Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

pub fn timestamp() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

/// Absolute form of a path that may not exist yet.
fn absolute(p: &Path) -> PathBuf {
    if let Ok(c) = p.canonicalize() {
        return c;
    }
    let parent = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    match (parent.canonicalize(), p.file_name()) {
        (Ok(dir), Some(name)) => dir.join(name),
        _ => p.to_path_buf(),
    }
}

/// Refuses an output path that names one of the inputs (or another output).
pub fn check_outputs(inputs: &[&Path], outputs: &[&Path]) -> Result<(), String> {
    let ins: Vec<PathBuf> = inputs.iter().map(|p| absolute(p)).collect();
    let mut seen: Vec<PathBuf> = Vec::new();
    for o in outputs {
        let a = absolute(o);
        if ins.contains(&a) {
            return Err(format!("output {} would overwrite an input", o.display()));
        }
        if seen.contains(&a) {
            return Err(format!("output {} is given twice", o.display()));
        }
        seen.push(a);
    }
    Ok(())
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn emit(out: Option<&Path>, json: &str) -> std::io::Result<()> {
    match out {
        Some(p) => write_atomic(p, json.as_bytes()),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(json.as_bytes())?;
            so.flush()
        }
    }
}
