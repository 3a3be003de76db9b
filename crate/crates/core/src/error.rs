use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    BadPrime(u64),
    #[error("log|0| has no finite value")]
    ZeroArgument,
    #[error("the zero vector has no projective class")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("values carry different primes ({0} and {1})")]
    ContextMismatch(u64, u64),
    #[error("coordinate {index} has negative valuation")]
    NotIntegral { index: usize },
    #[error("coordinate {pivot} of the normalized lift is not a unit")]
    PivotNotUnit { pivot: usize },
    #[error("monomial {exps:?} in form {form} does not have total degree {degree}")]
    DegreeMismatch {
        form: usize,
        exps: Vec<u32>,
        degree: u32,
    },
    #[error("the forms have a common nontrivial zero (resultant vanishes)")]
    NotAMorphism,
    #[error("argument out of range: {0}")]
    BadRange(String),
    #[error("unknown point strategy `{0}`")]
    BadStrategy(String),
    #[error("parse error: {0}")]
    Parse(String),
}
