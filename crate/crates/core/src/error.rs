use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("dimension mismatch: {0}")]
    ShapeMismatch(String),
    #[error("square root of a negative number")]
    NegativeRadicand,
    #[error("q must satisfy 0 < q < 1, got {0}")]
    BadQ(String),
    #[error("grid size N must be at least 1, got {0}")]
    BadN(i64),
    #[error("zero denominator in {0}")]
    ZeroDenominator(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("non-positive weight: {0}")]
    NonPositiveWeight(String),
    #[error("inadmissible parameters: {}", .0.join("; "))]
    InadmissibleParams(Vec<String>),
    #[error("degree mismatch in {what}: expected {expected}, got {got:?}")]
    DegreeMismatch {
        what: String,
        expected: usize,
        got: Option<usize>,
    },
    #[error("zero entry at position {0}")]
    ZeroEntry(usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("grid values are not strictly increasing at x = {0}")]
    NonMonotone(i64),
    #[error("Y has a negative coefficient at degree {0}")]
    NegativeYCoefficient(usize),
    #[error("cross-check failed: {0}")]
    CrossCheckMismatch(String),
    #[error("negative value under square root: {0}")]
    NegativeUnderSqrt(String),
    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
    #[error("unknown closed-form example {0:?}")]
    UnknownExample(String),
    #[error("R0 vanishes on the spectrum at n = {0}; ladder operators are not defined")]
    SingularR0(usize),
    #[error("negative pivot {value} at row {row}")]
    NegativePivot { row: usize, value: String },
    #[error("candidate {id} is inadmissible: {reason}")]
    InadmissibleCandidate { id: String, reason: String },
    #[error("cannot parse {0:?} as a rational number")]
    ParseScalar(String),
    #[error("configuration error: {0}")]
    Config(String),
}
