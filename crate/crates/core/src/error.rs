use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::model::ObjectId;

pub type Result<T, E = RtcError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum RtcError {
    #[error("team has no members")]
    EmptyTeam,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("weights must be finite and strictly positive (dimension {index} is {value})")]
    InvalidWeights { index: usize, value: f64 },
    #[error("exchange parameter must be finite and positive, object {id} has {value}")]
    InvalidLambda { id: ObjectId, value: f64 },
    #[error("object {0} is not a member of the team")]
    NotAMember(ObjectId),
    #[error("unknown object id {0}")]
    UnknownObject(ObjectId),
    #[error("duplicate object id {0}")]
    DuplicateId(ObjectId),
    #[error("non-finite attribute value at dimension {index}")]
    NonFinite { index: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("elite set is empty")]
    EmptyEliteSet,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("object space is empty")]
    EmptySpace,
    #[error("index fingerprint {found} does not match configuration {expected}")]
    StaleIndex { expected: String, found: String },
    #[error("partition {index} out of range (index has {partitions})")]
    InvalidPartition { index: usize, partitions: usize },
    #[error("corrupt index file {path}: {reason}")]
    CorruptIndex { path: PathBuf, reason: String },
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("malformed row {row}: {reason}")]
    MalformedRow { row: usize, reason: String },
    #[error("file has no data rows")]
    EmptyFile,
    #[error("invalid distribution parameters: {0}")]
    InvalidParams(String),
    #[error("binning produced fewer than two bins")]
    DegenerateBinning,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown team '{0}'")]
    UnknownTeam(String),
    #[error("team {team}: {source}")]
    Team {
        team: String,
        #[source]
        source: Box<RtcError>,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl RtcError {
    /// Wraps the error with the team it occurred for.
    pub fn for_team(self, team: &str) -> Self {
        RtcError::Team {
            team: team.to_string(),
            source: Box::new(self),
        }
    }
}
