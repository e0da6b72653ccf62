use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown root datum family `{0}`")]
    UnknownFamily(String),

    #[error("invalid root datum: {0}")]
    InvalidDatum(String),

    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },

    #[error("bound exceeded: {0}")]
    BoundExceeded(String),

    #[error("not a crystallographic root system: {0}")]
    NotCrystallographic(String),

    #[error("element is not in the Weyl group")]
    NotInWeylGroup,

    #[error("matrix is not invertible over the integers")]
    NotUnimodular,

    #[error("matrix has infinite order")]
    InfiniteOrder,

    #[error("integer overflow in exact lattice arithmetic")]
    Overflow,

    #[error("vector is not in the norm-zero sublattice")]
    NotNormZero,

    #[error("s not σ_H-invariant on boundaries: {0}")]
    KappaUndefined(String),

    #[error("invalid field parameters: {0}")]
    InvalidField(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("division by an element that is zero at precision")]
    DivisionByZero,

    #[error("precision exhausted: {0}")]
    Precision(String),

    #[error("expected a unit, got valuation {0}")]
    NotUnit(i64),

    #[error("element is zero at precision")]
    ZeroAtPrecision,

    #[error("iteration failed to stabilize within {0} steps")]
    NoConvergence(usize),

    #[error("not strongly regular at this precision")]
    NotStronglyRegular,

    #[error("not strongly G-regular: {0}")]
    NotGRegular(String),

    #[error("norm is not 1")]
    NormNotOne,

    #[error("determinant is not 1")]
    DetNotOne,

    #[error("no unramified endoscopic matching: {0}")]
    Ramified(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Input(String),
}
