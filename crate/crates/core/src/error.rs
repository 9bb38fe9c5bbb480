use thiserror::Error;

/// Errors raised by the counting, series and estimation layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("modulus {0} is not a monic irreducible polynomial of the requested degree")]
    ReducibleModulus(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("resource cap exceeded: {what} needs {needed} items, cap is {cap}")]
    ResourceLimit { what: String, needed: String, cap: u64 },
    #[error("the quadratic character is only used for odd q, got q = {0}")]
    EvenCharacteristic(u64),
    #[error("residue and modulus are not coprime")]
    NotCoprime,
    #[error("truncation orders differ: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("constant term must be {0}")]
    BadConstantTerm(&'static str),
    #[error("psi values are not the log-derivative of an integral product (fails at n = {0})")]
    NotInvertible(usize),
    #[error("L-polynomial violates the Riemann hypothesis: inverse root modulus {modulus} vs sqrt(q) = {expected}")]
    RhViolation { modulus: String, expected: String },
    #[error("L-polynomial yields a negative or non-integral place count at degree {0}")]
    NegativeCount(u64),
    #[error("c1 must not be an integer")]
    IntegerC1,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("expansion order m = {m} must be smaller than n = {n}")]
    ExpansionOrderTooLarge { m: usize, n: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_error(what: impl Into<String>, needed: impl ToString, cap: u64) -> Error {
    Error::ResourceLimit { what: what.into(), needed: needed.to_string(), cap }
}
