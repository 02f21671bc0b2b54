use thiserror::Error;

use crate::poly::PolyError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("truncation orders differ: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("`{0}` is not a unit in the truncated ring")]
    NotAUnit(String),
    #[error("`{0}` is not monic in z")]
    NotMonic(String),
    #[error("map is not congruent to the identity modulo x^{0}")]
    NotInA(u32),
    #[error("map is outside the invertible class (identity or diagonal scaling mod x)")]
    UnsupportedInverse,
    #[error("first-order deviation is not divergence free: {0}")]
    NotClosed(String),
    #[error("map does not stabilize the ideal (r): remainder {0}")]
    NotStabilizing(String),
    #[error("potential `{0}` is not a multiple of r0 up to a constant")]
    NotMultipleOfR0(String),
    #[error("polynomial is not in the ideal (r, x^d): {0}")]
    NotInIdeal(String),
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("map does not preserve the ideal (x): x maps to {0}")]
    XNotPreserved(String),
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("polynomial `{0}` uses variables outside {1}")]
    OutsideVariables(String, &'static str),
    /// A word's image degree bound outgrew the caller's budget.
    #[error("image degree bound {bound} exceeds budget {budget}")]
    DegreeBudget { bound: u64, budget: u64 },
    /// An internal certificate did not check out. Always an implementation bug.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}
