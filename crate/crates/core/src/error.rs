use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(String, String),
    #[error("not p-integral: {0}")]
    NotPIntegral(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("enumeration cap exceeded: {size} > {cap}")]
    CapExceeded { size: u128, cap: u128 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate Gauss-sum pattern: {0}")]
    DegenerateRatio(String),
    #[error("singular fiber: {0}")]
    SingularFiber(String),
    #[error("unsupported family: {0}")]
    Unsupported(String),
    #[error("variable mismatch: {0} vs {1}")]
    VariableMismatch(String, String),
    #[error("reduction failed: {0}")]
    Reduction(String),
    #[error("no dependence found: {0}")]
    NoDependence(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("non-integral zeta coefficient at T^{0}: {1}")]
    NonIntegral(usize, String),
}

pub type Result<T> = std::result::Result<T, Error>;
