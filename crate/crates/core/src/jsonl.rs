//! Line-delimited JSON reading and writing.

use std::io::{BufRead, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonlError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses every non-blank line, keeping per-line results so callers can
/// report all bad lines.
pub fn read_lines<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<(usize, Result<T, JsonlError>)>, JsonlError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str(&line).map_err(|source| JsonlError::Parse { line: i + 1, source });
        out.push((i + 1, parsed));
    }
    Ok(out)
}

/// Parses every non-blank line, failing on the first bad one.
pub fn read_all<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>, JsonlError> {
    read_lines(reader)?.into_iter().map(|(_, r)| r).collect()
}

pub fn read_file<T: DeserializeOwned>(path: impl AsRef<std::path::Path>) -> Result<Vec<T>, JsonlError> {
    let f = std::fs::File::open(path)?;
    read_all(std::io::BufReader::new(f))
}

pub fn write_all<T: Serialize>(mut writer: impl Write, items: impl IntoIterator<Item = T>) -> std::io::Result<()> {
    for item in items {
        serde_json::to_writer(&mut writer, &item)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
