use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` to `dir/name` through a temporary file and a rename, so a
/// reader never sees a partially written file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, &target).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(&target, e)
    })?;
    Ok(target)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Column {
    Int,
    Float,
    /// Float or `NA`.
    OptFloat,
    /// `0` or `1`.
    Flag,
    Text,
}

/// Re-reads a written CSV file and checks the header and every field.
pub fn validate_csv(path: &Path, header: &str, columns: &[Column]) -> Result<usize> {
    let fail = |reason: String| Error::OutputSchema {
        path: path.to_path_buf(),
        reason,
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => return Err(fail(format!("header {other:?}, expected {header:?}"))),
    }
    let mut rows = 0;
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(fail(format!(
                "row {} has {} fields, expected {}",
                i + 2,
                fields.len(),
                columns.len()
            )));
        }
        for (field, kind) in fields.iter().zip(columns) {
            let ok = match kind {
                Column::Int => field.parse::<u64>().is_ok(),
                Column::Float => field.parse::<f64>().is_ok(),
                Column::OptFloat => *field == "NA" || field.parse::<f64>().is_ok(),
                Column::Flag => *field == "0" || *field == "1",
                Column::Text => !field.is_empty(),
            };
            if !ok {
                return Err(fail(format!("row {}: bad value {field:?} for {kind:?}", i + 2)));
            }
        }
        rows += 1;
    }
    Ok(rows)
}
