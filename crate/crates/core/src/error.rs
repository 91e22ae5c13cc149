use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("operands belong to different fields ({left} vs {right})")]
    FieldMismatch { left: String, right: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,

    #[error("constant polynomial is not allowed here")]
    ConstantPolynomial,

    #[error("degree must be at least 1")]
    ZeroDegree,

    #[error("enumeration of {requested} items exceeds the budget of {budget}; use sampling instead")]
    BudgetExceeded { requested: u128, budget: u128 },

    #[error("not a cubic: {0}")]
    NotCubic(String),

    #[error("{ell} does not divide q - 1 = {q_minus_one}")]
    NoRootsOfUnity { ell: u64, q_minus_one: u64 },

    #[error("invalid ell = {0}: must be a prime >= 5")]
    InvalidEll(u64),

    #[error("invalid prime p = {0}: {1}")]
    InvalidPrime(u64, String),

    #[error("arguments are not coprime")]
    NotCoprime,

    #[error("discriminant vanishes: the cubic is inseparable")]
    Inseparable,

    #[error("curve is not certified as an S3 extension: {0}")]
    NotCertified(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("truncated tail mass {tail:e} exceeds tolerance {tolerance:e}; increase R")]
    TailExceeded { tail: f64, tolerance: f64 },

    #[error("incompatible operator and distribution: {0}")]
    Incompatible(String),

    #[error("spectral estimate failed: {0}")]
    Spectral(String),

    #[error("{0}")]
    Domain(String),
}
