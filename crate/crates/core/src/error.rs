use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("identifier {0:?} has no alphanumeric characters")]
    Unsplittable(String),

    #[error("unknown tag {0}")]
    UnknownTag(String),

    #[error("unknown identifier context {0}")]
    UnknownContext(String),

    #[error("unknown feature {0}")]
    UnknownFeature(String),

    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("record {record} lacks the {feature} column")]
    MissingColumn { record: String, feature: String },

    #[error("record {0} has no gold tags")]
    MissingGold(String),

    #[error("feature mismatch: model expects [{expected}], got [{found}]")]
    FeatureMismatch { expected: String, found: String },

    #[error("invalid model: {0}")]
    Model(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
