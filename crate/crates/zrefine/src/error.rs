use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space config: dims={dims}, bits={bits} (need dims >= 1, bits >= 1, dims*bits <= 128)")]
    InvalidConfig { dims: u32, bits: u32 },

    #[error("coordinate {value} of dimension {dim} exceeds the {bits}-bit maximum {max}")]
    CoordinateOutOfRange { dim: usize, value: u128, bits: u32, max: u128 },

    #[error("z-value {value} exceeds the z-space maximum {max}")]
    ZValueOutOfRange { value: u128, max: u128 },

    #[error("expected {expected} dimensions, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension {dim}: bound {start}..{end} is inverted or exceeds the coordinate maximum {max}")]
    InvalidBounds { dim: usize, start: u128, end: u128, max: u128 },

    #[error("value domain with min {min} and {bits} bits does not fit signed 64-bit values")]
    DomainTooWide { min: i64, bits: u32 },

    #[error("row pk={pk}, column {column}: value {value} outside the domain [{lo}, {hi}]")]
    ValueOutsideDomain { pk: u64, column: usize, value: i64, lo: i128, hi: i128 },

    #[error("z-range of {len} values exceeds the oracle scan guard of {guard}")]
    ScanGuardExceeded { len: u128, guard: u128 },

    #[error("region syntax: {0}")]
    RegionSyntax(String),

    #[error("dataset: {0}")]
    Dataset(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
