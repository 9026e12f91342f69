//! Getting graphs into memory: typed JSONL, CSV with typed headers, and a
//! seeded synthetic generator with type-fault injection.

mod codec;
mod csv;
mod jsonl;
mod synthetic;

use std::path::{Path, PathBuf};

use crate::graph::GraphError;

pub use self::codec::{decode_cell, decode_json, encode_json};
pub use self::csv::{load_csv, CsvLoader};
pub use self::jsonl::{load_jsonl, write_jsonl, JsonlLoader};
pub use self::synthetic::{
    generate_synthetic, Fault, FaultLedger, LabelSchema, PropertySchema, RelSchema, SyntheticSpec,
};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{}:{line}: unknown type tag `{tag}`", path.display())]
    UnknownTag {
        path: PathBuf,
        line: u64,
        tag: String,
    },
    #[error("{}:{line}: unknown node id `{id}`", path.display())]
    UnknownNode {
        path: PathBuf,
        line: u64,
        id: String,
    },
    #[error("{}:{line}: duplicate node id `{id}`", path.display())]
    DuplicateId {
        path: PathBuf,
        line: u64,
        id: String,
    },
    #[error("{}: header is missing column `{column}`", path.display())]
    MissingColumn { path: PathBuf, column: &'static str },
    #[error("{}: bad header: {message}", path.display())]
    BadHeader { path: PathBuf, message: String },
    #[error("{}:{line}: {source}", path.display())]
    Graph {
        path: PathBuf,
        line: u64,
        #[source]
        source: GraphError,
    },
    #[error("invalid synthetic spec: {0}")]
    Spec(String),
}

impl IngestError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IngestError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn malformed(path: &Path, line: u64, message: impl Into<String>) -> Self {
        IngestError::Malformed {
            path: path.to_path_buf(),
            line,
            message: message.into(),
        }
    }
}

/// Why a single typed value could not be decoded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodeError {
    UnknownTag(String),
    Invalid(String),
}

impl DecodeError {
    pub(crate) fn at(self, path: &Path, line: u64, property: &str) -> IngestError {
        match self {
            DecodeError::UnknownTag(tag) => IngestError::UnknownTag {
                path: path.to_path_buf(),
                line,
                tag,
            },
            DecodeError::Invalid(message) => {
                IngestError::malformed(path, line, format!("property `{property}`: {message}"))
            }
        }
    }
}
