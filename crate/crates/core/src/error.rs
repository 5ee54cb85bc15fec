use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension {n} out of range (allowed 1..={cap})")]
    Dimension { n: u32, cap: u32 },
    #[error("point index {index} out of range for n = {n}")]
    PointOutOfRange { index: u64, n: u32 },
    #[error("subset mask {mask:#x} out of range for n = {n}")]
    MaskOutOfRange { mask: u64, n: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("BFN1 parse error: {0}")]
    Parse(String),
    #[error("spectrum is not normalized (real-valued source)")]
    NotNormalized,
    #[error("function is constant; {0} is undefined")]
    ConstantFunction(&'static str),
    #[error("internal identity violated: {0}")]
    InternalIdentity(String),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error("exhaustive enumeration requested for n = {0}; only n <= 4 is supported")]
    ExhaustiveTooLarge(u32),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
