//! Line-delimited JSON readers/writers for the pipeline's on-disk
//! formats, plus the stage manifest written next to each output.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::logstmt::LogLevel;

/// One mined method as stored in `methods.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodLine {
    pub id: String,
    pub repo: String,
    pub path: String,
    /// Space-joined normalized token text.
    pub tokens: String,
    pub n_logs: usize,
    /// (start, end) token spans of detected log statements.
    pub log_spans: Vec<(usize, usize)>,
    pub log_levels: Vec<LogLevel>,
}

/// One prediction as exchanged with external models.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionLine {
    pub instance_id: String,
    pub prediction_text: String,
}

/// One split assignment line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitLine {
    pub instance_id: String,
    pub split: crate::dataset::Split,
}

/// Append-only JSONL writer; one record per line, flushed on `finish`.
pub struct JsonlWriter<T> {
    out: BufWriter<File>,
    written: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Serialize> JsonlWriter<T> {
    pub fn create(path: &Path) -> Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        Ok(JsonlWriter {
            out: BufWriter::new(File::create(path)?),
            written: 0,
            _marker: std::marker::PhantomData,
        })
    }

    pub fn write(&mut self, record: &T) -> Result<()> {
        serde_json::to_writer(&mut self.out, record)?;
        self.out.write_all(b"\n")?;
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<usize> {
        self.out.flush()?;
        Ok(self.written)
    }
}

/// Read a whole JSONL file into memory.
pub fn read_all<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::MissingArtifact(path.display().to_string()));
    }
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            path: path.display().to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_all<T: Serialize>(path: &Path, records: &[T]) -> Result<usize> {
    let mut w = JsonlWriter::create(path)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()
}

/// SHA-256 of a file, hex-encoded; used for manifest input hashes.
pub fn file_sha256(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    let mut reader = BufReader::new(File::open(path)?);
    std::io::copy(&mut reader, &mut hasher)?;
    Ok(hasher.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

/// Reproducibility manifest written next to each stage's outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    /// path -> sha256 of each input artifact.
    pub input_hashes: std::collections::BTreeMap<String, String>,
}

impl StageManifest {
    pub fn new(stage: &str, seed: u64, config: serde_json::Value) -> Self {
        StageManifest {
            stage: stage.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            input_hashes: Default::default(),
        }
    }

    pub fn add_input(&mut self, path: &Path) -> Result<()> {
        self.input_hashes.insert(path.display().to_string(), file_sha256(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_missing_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.jsonl");
        let records = vec![
            PredictionLine { instance_id: "a".into(), prediction_text: "x y".into() },
            PredictionLine { instance_id: "b".into(), prediction_text: "z".into() },
        ];
        write_all(&path, &records).unwrap();
        let back: Vec<PredictionLine> = read_all(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].instance_id, "b");

        let missing = dir.path().join("nope.jsonl");
        assert!(matches!(
            read_all::<PredictionLine>(&missing),
            Err(Error::MissingArtifact(_))
        ));
    }

    #[test]
    fn malformed_line_reports_location() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "{\"instance_id\":\"a\",\"prediction_text\":\"x\"}\nnot json\n").unwrap();
        match read_all::<PredictionLine>(&path) {
            Err(Error::MalformedRecord { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected: {other:?}"),
        }
    }
}
