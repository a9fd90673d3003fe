use std::io::{Read, Write};
use std::path::Path;

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let unwritable = |reason: String| CliError::Unwritable {
        path: path.display().to_string(),
        reason,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| unwritable(e.to_string()))?;
    tmp.write_all(bytes)
        .map_err(|e| unwritable(e.to_string()))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| unwritable(e.to_string()))?;
    tmp.persist(path)
        .map_err(|e| unwritable(e.error.to_string()))?;
    Ok(())
}

/// Reads a file, or standard input for `-`.
pub fn read_input(path: &Path) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
    }
}

/// Sends `text` to `out` if given and returns what remains for stdout.
pub fn deliver(text: String, out: Option<&Path>) -> CliResult<String> {
    match out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

pub fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}
