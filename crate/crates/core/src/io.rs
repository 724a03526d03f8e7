//! JSONL and CSV artifacts.

use serde::{de::DeserializeOwned, Serialize};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("file not found: {0}")]
    NotFound(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed artifact at line {line}: {message}")]
    MalformedArtifact { line: usize, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn open(path: &Path) -> Result<std::fs::File, IoError> {
    std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => IoError::NotFound(path.display().to_string()),
        _ => IoError::Io(e),
    })
}

pub fn to_jsonl<T: Serialize>(rows: &[T], mut w: impl Write) -> Result<(), IoError> {
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), IoError> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    to_jsonl(rows, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| IoError::MalformedArtifact { line: i + 1, message: e.to_string() })?,
        );
    }
    Ok(out)
}

pub fn to_csv<T: Serialize>(rows: &[T], w: impl Write) -> Result<(), IoError> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), IoError> {
    to_csv(rows, std::fs::File::create(path)?)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let mut rd = csv::Reader::from_reader(open(path)?);
    rd.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| IoError::MalformedArtifact { line: i + 2, message: e.to_string() }))
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    serde_json::from_reader(BufReader::new(open(path)?))
        .map_err(|e| IoError::MalformedArtifact { line: e.line(), message: e.to_string() })
}
