use thiserror::Error;

/// Errors produced by the sparse frequency analysis library.
#[derive(Debug, Error)]
pub enum SfaError {
    #[error("signal must have at least 2 samples, got {0}")]
    SignalTooShort(usize),
    #[error("non-finite value at {context}")]
    NonFinite { context: String },
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("index set is empty")]
    EmptyIndexSet,
    #[error("frequency index {index} out of range for grid of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("index set is not contiguous")]
    NonContiguous,
    #[error("band {lo}..={hi} has even cardinality; a centered merge needs an odd count")]
    EvenCardinality { lo: usize, hi: usize },
    #[error("band component has no merged amplitude pair")]
    MissingMerge,
    #[error("phase series have different center frequencies ({0} vs {1})")]
    CenterMismatch(f64, f64),
    #[error("PLV window {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("degenerate MM scale: sum of V_k vanished at sample {0}")]
    DegenerateScale(usize),
    #[error("invalid band [{lo}, {hi}]: need 0 <= lo < hi <= 0.5")]
    BadBand { lo: f64, hi: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SfaError>;
