use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::chordify::ChordifyError;
use crate::smf::SmfError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("work {work_id}: {source}")]
    Midi {
        work_id: String,
        #[source]
        source: SmfError,
    },

    #[error("work {work_id}: {source}")]
    Chordify {
        work_id: String,
        #[source]
        source: ChordifyError,
    },

    #[error("{} file(s) failed to ingest:\n{}", .0.len(), format_failures(.0))]
    IngestFailed(Vec<(PathBuf, String)>),

    #[error("{path}:{line}: malformed codeword line: {reason}")]
    MalformedCodeword {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("work {work_id}: sequence file {path} does not exist")]
    MissingSequence { work_id: String, path: PathBuf },

    #[error("duplicate work id {0}")]
    DuplicateWork(String),

    #[error("duplicate composer id {0}")]
    DuplicateComposer(String),

    #[error("work {work_id} references unknown composer {composer_id}")]
    UnknownComposer {
        work_id: String,
        composer_id: String,
    },

    #[error("unknown work id {0}")]
    UnknownWork(String),

    #[error("work {0} has no year")]
    Undated(String),

    #[error("work {0} has an empty codeword sequence")]
    EmptySequence(String),

    #[error("invalid id token {0:?}: expected [A-Za-z0-9_.-]+")]
    InvalidToken(String),

    #[error("composer {id}: death year {death} precedes birth year {birth}")]
    InvalidLifespan { id: String, birth: i32, death: i32 },

    #[error("unknown period {0:?}")]
    UnknownPeriod(String),

    #[error("vocabulary size {given} is smaller than the {observed} observed codewords")]
    VocabularyTooSmall { given: usize, observed: usize },

    #[error("influence of composer {composer_id} on its own work {work_id} is excluded")]
    SelfInfluence {
        composer_id: String,
        work_id: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for bad input, 2 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 2,
            _ => 1,
        }
    }
}

fn format_failures(failures: &[(PathBuf, String)]) -> String {
    failures
        .iter()
        .map(|(path, reason)| format!("  {}: {reason}", path.display()))
        .collect::<Vec<_>>()
        .join("\n")
}
