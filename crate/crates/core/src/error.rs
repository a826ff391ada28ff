use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("galois exponent {0} is not invertible mod {1}")]
    GaloisExponent(i64, u32),
    #[error("basis not independent")]
    BasisNotIndependent,
    #[error("elements belong to different fields (ell = {0} vs {1})")]
    FieldMismatch(u32, u32),
    #[error("division by zero in Q(zeta_{0})")]
    DivisionByZero(u32),
    #[error("zero generator for an ideal")]
    ZeroIdeal,
    #[error("ell = {0} is not an odd prime")]
    NotOddPrime(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("unstable action: CZ+D is numerically singular")]
    UnstableAction,
    #[error("not in H_g: {0}")]
    NotInSiegelSpace(String),
    #[error("degenerate alternating form")]
    DegenerateForm,
    #[error("alternating form is not antisymmetric")]
    NotAlternating,
    #[error("characteristic is not half-integral")]
    NotHalfIntegral,
    #[error("characteristic is integral; the Siegel function needs v outside Z^2")]
    IntegralCharacteristic,
    #[error("Im(tau) must be positive")]
    NotUpperHalfPlane,
    #[error("pole of Theta: {0}")]
    PoleOfTheta(String),
    #[error("level N must be at least 2 (got {0})")]
    InvalidLevel(i64),
    #[error("characteristic entries do not have denominator dividing {0}")]
    DenominatorMismatch(i64),
    #[error("class number != 1 unsupported (ell = {0})")]
    UnsupportedClassNumber(u32),
    #[error("x-basis not integral basis")]
    NonIntegralBasis,
    #[error("degenerate CM data: period block is singular")]
    DegenerateCmData,
    #[error("representative {0} is not coprime to the conductor")]
    NotCoprime(String),
    #[error("not same ray class")]
    NotSameRayClass,
    #[error("unknown ray class label {0}")]
    UnknownClass(usize),
    #[error("log of zero")]
    LogOfZero,
    #[error("character does not match the class group structure")]
    BadCharacter,
    #[error("insufficient precision for target magnitudes: {0}")]
    InsufficientPrecision(String),
    #[error("polarization is not principal: elementary divisors {0}")]
    NotPrincipal(String),
    #[error("invariant for class {label} failed: {source}")]
    ClassFailure { label: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
