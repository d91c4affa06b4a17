use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape {rows}x{cols}: both dimensions must be at least 1")]
    InvalidShape { rows: usize, cols: usize },

    #[error("data length {actual} does not match the expected {expected}")]
    DataLength { expected: usize, actual: usize },

    #[error("unsupported delta width {0} bits (expected 1, 2, 4 or 8)")]
    InvalidDeltaWidth(u8),

    #[error("unsupported value width {0} bits (only 16-bit values are stored)")]
    InvalidValueWidth(u8),

    #[error("delta {delta} outside the representable range [1, {max}]")]
    DeltaOutOfRange { delta: u32, max: u32 },

    #[error("row {row}: column {col} is outside a matrix with {cols} columns")]
    ColumnOutOfBounds { row: usize, col: u64, cols: usize },

    #[error("row {row}: column indices are not strictly increasing")]
    UnsortedRow { row: usize },

    #[error("row {row}: stored value is zero")]
    StoredZero { row: usize },

    #[error("row pointers are malformed: {0}")]
    RowPointers(String),

    #[error("encoded matrix is too large: {0} entries exceed 32-bit row pointers")]
    TooLarge(u64),

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("density {0} is outside [0, 1]")]
    InvalidDensity(f64),

    #[error("infeasible pattern: {0}")]
    InfeasiblePattern(String),

    #[error("corrupt matrix data: {0}")]
    Corrupt(String),

    #[error("bad magic {0:?}, expected \"MCKO\"")]
    BadMagic([u8; 4]),

    #[error("unsupported file version {0}")]
    UnsupportedVersion(u16),

    #[error("file truncated while reading {0}")]
    Truncated(&'static str),

    #[error("matrix market line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
