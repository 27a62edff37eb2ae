use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the measurement engine.
///
/// Variants are split into input problems (bad files, inconsistent
/// dimensions, violated preconditions) and stage failures that the pipeline
/// may downgrade into absent measurements.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no foreground voxels for the requested classes")]
    NoForeground,

    #[error("empty probability vector")]
    EmptyProbabilities,

    #[error("not separable: all points carry the same label")]
    NotSeparable,

    #[error("missing structure: {0}")]
    MissingStructure(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("line does not cross the region of interest")]
    LineOutsideRoi,

    #[error("ray leaves the image before reaching its end point")]
    RayOutOfBounds,

    #[error("sylvian fissure not found")]
    FissureNotFound,

    #[error("skull not found: {0}")]
    SkullNotFound(String),

    #[error("no slice contains the cerebellum")]
    NoCerebellum,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("unmatched volume identifiers: {0:?}")]
    UnmatchedIds(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("unsupported format: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by unreadable or inconsistent inputs, as opposed
    /// to failures inside a pipeline stage.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch(_)
                | Error::Io { .. }
                | Error::Json { .. }
                | Error::Csv { .. }
                | Error::Format(_)
                | Error::LengthMismatch(..)
                | Error::UnmatchedIds(_)
                | Error::EmptyProbabilities
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
