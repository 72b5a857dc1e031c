use thiserror::Error;

pub type Result<T> = std::result::Result<T, QwaveError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QwaveError {
    #[error("duplicate mode label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid cutoff {cutoff} for mode `{label}`: {reason}")]
    InvalidCutoff {
        label: String,
        cutoff: usize,
        reason: &'static str,
    },

    #[error("register must declare at least one mode")]
    EmptyRegister,

    #[error("occupation {value} of mode `{label}` exceeds cutoff {cutoff}")]
    OccupationOutOfRange {
        label: String,
        value: usize,
        cutoff: usize,
    },

    #[error("occupation pattern has {got} entries, register has {expected} modes")]
    OccupationLength { expected: usize, got: usize },

    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("mode `{label}` has kind {found}, expected {expected}")]
    KindMismatch {
        label: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("modes `{first}` and `{second}` are not at the same site")]
    SiteMismatch { first: String, second: String },

    #[error("coherent tail {tail:e} above cutoff {cutoff} exceeds bound {bound:e}")]
    TailBoundExceeded { tail: f64, bound: f64, cutoff: usize },

    #[error("operator is not hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("operands live on different registers")]
    RegisterMismatch,

    #[error("matrix shape {rows}x{cols} does not match register dimension {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },

    #[error("state norm {0} is not 1 within tolerance")]
    NotNormalized(f64),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("measurements `{0}` and `{1}` do not commute")]
    NonCommutingSpecs(String, String),

    #[error("unknown outcome `{0}`")]
    UnknownOutcome(String),

    #[error("outcome `{outcome}` has probability {probability:e}")]
    ImpossibleOutcome { outcome: String, probability: f64 },

    #[error("chain length {0} too large for exhaustive enumeration (max 8)")]
    NTooLarge(usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}
