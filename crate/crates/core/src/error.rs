use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the supported maximum of 256")]
    FieldTooLarge { p: u32, k: u32 },
    #[error("no built-in modulus for q = {0}; supply one explicitly")]
    NoModulus(usize),
    #[error("modulus must be monic of degree {expected} over F_{p}")]
    BadModulus { p: u32, expected: u32 },
    #[error("modulus is reducible over F_{0}")]
    ReducibleModulus(u32),
    #[error("{0} is not a supported prime power")]
    UnsupportedOrder(usize),
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("frobenius exponent {j} out of range for extension degree {k}")]
    FrobeniusRange { j: u32, k: u32 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector is not allowed here")]
    ZeroVector,
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("graph would have {vertices} vertices, over the limit of {limit}")]
    SizeGuard { vertices: usize, limit: usize },
    #[error("vertex id {0} out of range")]
    InvalidVertex(usize),
    #[error("unsupported export format `{0}`")]
    UnsupportedFormat(String),
    #[error("malformed graph6 input: {0}")]
    Graph6(String),
    #[error("not a permutation: {0}")]
    NotPermutation(String),
    #[error("permutation is not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("operation requires n = 2")]
    RequiresPlane,
    #[error("phi must be a permutation of the field fixing 0")]
    BadPhi,
    #[error("twin permutation table entry invalid: {0}")]
    BadTwinTable(String),
    #[error("malformed decomposition: {0}")]
    BadDecomposition(String),
    #[error("time budget exhausted")]
    Timeout,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
