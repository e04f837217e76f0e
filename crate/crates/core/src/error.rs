use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("insufficient data: {0}")]
    Insufficient(String),
    #[error("instance {index}: {source}")]
    AtInstance { index: usize, source: Box<Error> },
    #[error("label {label} out of range for {classes} classes")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("instance {0} has no label")]
    MissingLabel(usize),
    #[error("value {0} outside [0, 1]")]
    OutOfUnitRange(f64),
    #[error("kappa undefined: chance agreement is 1 but observed accuracy is {0}")]
    KappaUndefined(f64),
    #[error("no drift has been recorded yet")]
    NoDrift,
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unknown stream generator `{0}`")]
    UnknownGenerator(String),
}

impl Error {
    pub(crate) fn at(index: usize, source: Error) -> Self {
        Error::AtInstance { index, source: Box::new(source) }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
