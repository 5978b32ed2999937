use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("combinatorial count exceeds the 128-bit range")]
    Overflow,

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: u64, max: u64 },

    #[error("agent count {n} outside supported range 1..={max}")]
    AgentCountOutOfRange { n: u32, max: u32 },

    #[error("invalid integer partition: {0}")]
    InvalidPartition(String),

    #[error("coalitions overlap")]
    OverlappingCoalitions,

    #[error("coalitions do not cover the full agent set")]
    NonExhaustiveCoalitions,

    #[error("empty coalition has no value")]
    EmptyCoalition,

    #[error("instance too large for this solver: n={n} exceeds limit {max}")]
    BaselineLimitExceeded { n: u32, max: u32 },

    #[error("bad magic bytes in instance file")]
    BadMagic,

    #[error("unsupported instance file version {0}")]
    UnsupportedVersion(u16),

    #[error("unknown distribution tag {0}")]
    UnknownDistributionTag(u8),

    #[error("value payload length mismatch: expected {expected} bytes, found {actual}")]
    LengthMismatch { expected: u64, actual: u64 },

    #[error("non-finite value for size {size} at index {index}")]
    NonFinite { size: u32, index: u64 },

    #[error("malformed instance text: {0}")]
    MalformedText(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
