//! Flat-file store under a data directory:
//!
//! ```text
//! datasets/{id}.nt        uploaded statements, duplicates kept
//! datasets/{id}.vocab.nt  mapping vocabulary, for CSV uploads
//! reports/{id}.{nt,ttl,json}
//! traces/{jobId}.jsonl
//! jobs/{jobId}.json
//! ```
//!
//! Report ids are content addresses: the first 16 hex digits of the SHA-256
//! of the report's N-Triples.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{render_report, to_json_bytes, ReportFormat};
use crate::assess::{report_ntriples, AssessmentReport};
use crate::rdf::{parse_ntriples, Graph, ParseError};

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("invalid id {0:?}")]
    InvalidId(String),
    #[error("dataset {0} already exists")]
    Exists(String),
    #[error("stored dataset {id} is unreadable: {source}")]
    Corrupt {
        id: String,
        #[source]
        source: ParseError,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Ids become file names, so they are kept to a safe alphabet.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

fn check(id: &str) -> Result<(), StoreError> {
    if valid_id(id) {
        Ok(())
    } else {
        Err(StoreError::InvalidId(id.to_string()))
    }
}

pub fn report_id(report: &AssessmentReport) -> String {
    hex::encode(Sha256::digest(report_ntriples(report)))[..16].to_string()
}

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        for sub in ["datasets", "reports", "traces", "jobs"] {
            fs::create_dir_all(root.join(sub))?;
        }
        Ok(Store { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn path(&self, dir: &str, file: String) -> PathBuf {
        self.root.join(dir).join(file)
    }

    pub fn has_dataset(&self, id: &str) -> bool {
        valid_id(id) && self.path("datasets", format!("{id}.nt")).exists()
    }

    /// Writes a dataset once; datasets are immutable afterwards.
    pub fn put_dataset(&self, id: &str, ntriples: &[u8], vocab: Option<&Graph>) -> Result<(), StoreError> {
        check(id)?;
        let path = self.path("datasets", format!("{id}.nt"));
        let mut file = match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(f) => f,
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => return Err(StoreError::Exists(id.to_string())),
            Err(e) => return Err(e.into()),
        };
        io::Write::write_all(&mut file, ntriples)?;
        if let Some(v) = vocab {
            fs::write(
                self.path("datasets", format!("{id}.vocab.nt")),
                crate::rdf::serialize_ntriples(v),
            )?;
        }
        Ok(())
    }

    /// The dataset and its vocabulary (empty when none was stored).
    pub fn dataset(&self, id: &str) -> Result<Option<(Graph, Graph)>, StoreError> {
        check(id)?;
        let path = self.path("datasets", format!("{id}.nt"));
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |source| StoreError::Corrupt {
            id: id.to_string(),
            source,
        };
        let graph = parse_ntriples(&bytes).map_err(corrupt)?;
        let vocab = match fs::read(self.path("datasets", format!("{id}.vocab.nt"))) {
            Ok(b) => parse_ntriples(&b).map_err(corrupt)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Graph::new(),
            Err(e) => return Err(e.into()),
        };
        Ok(Some((graph, vocab)))
    }

    /// Stores all three renderings and returns the report id.
    pub fn put_report(&self, report: &AssessmentReport) -> Result<String, StoreError> {
        let id = report_id(report);
        for format in [ReportFormat::Ntriples, ReportFormat::Turtle, ReportFormat::Json] {
            fs::write(
                self.path("reports", format!("{id}.{}", format.extension())),
                render_report(report, format),
            )?;
        }
        Ok(id)
    }

    pub fn report(&self, id: &str, format: ReportFormat) -> Result<Option<Vec<u8>>, StoreError> {
        check(id)?;
        read_optional(&self.path("reports", format!("{id}.{}", format.extension())))
    }

    pub fn put_trace(&self, job_id: &str, jsonl: &str) -> Result<(), StoreError> {
        check(job_id)?;
        fs::write(self.path("traces", format!("{job_id}.jsonl")), jsonl)?;
        Ok(())
    }

    pub fn put_job(&self, job_id: &str, record: &Value) -> Result<(), StoreError> {
        check(job_id)?;
        // write then rename so readers never see a half-written record
        let tmp = self.path("jobs", format!("{job_id}.json.tmp"));
        fs::write(&tmp, to_json_bytes(record))?;
        fs::rename(tmp, self.path("jobs", format!("{job_id}.json")))?;
        Ok(())
    }

    pub fn job(&self, job_id: &str) -> Result<Option<Value>, StoreError> {
        check(job_id)?;
        match read_optional(&self.path("jobs", format!("{job_id}.json")))? {
            Some(b) => Ok(serde_json::from_slice(&b).ok()),
            None => Ok(None),
        }
    }
}

fn read_optional(path: &Path) -> Result<Option<Vec<u8>>, StoreError> {
    match fs::read(path) {
        Ok(b) => Ok(Some(b)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn datasets_are_write_once() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let nt = b"<urn:a> <urn:p> <urn:b> .\n<urn:a> <urn:p> <urn:b> .\n";
        store.put_dataset("d1", nt, None).unwrap();
        assert!(matches!(store.put_dataset("d1", nt, None), Err(StoreError::Exists(_))));
        let (g, vocab) = store.dataset("d1").unwrap().unwrap();
        assert_eq!((g.len(), g.raw_statement_count(), vocab.len()), (1, 2, 0));
        assert!(store.dataset("d2").unwrap().is_none());
    }

    #[test]
    fn path_like_ids_rejected() {
        assert!(!valid_id("../etc"));
        assert!(!valid_id(""));
        assert!(valid_id("a1_b-2"));
    }
}
