//! Error types shared by the whole crate.

/// Branch tracking along the real segment failed: the modulus of L dropped
/// below the zero guard at `at_s` (or the step count blew past the cap while
/// trying to keep the phase increments small).
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("branch tracking failed at s = {at_s}: |L| = {l_modulus:.4e}")]
pub struct BranchFailure {
    pub at_s: f64,
    pub l_modulus: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum CoreError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {got} out of range {range}")]
    OutOfRange {
        what: &'static str,
        got: f64,
        range: &'static str,
    },

    #[error("sieve limit {limit} exceeds cap {cap}")]
    SieveLimit { limit: u64, cap: u64 },

    #[error("pole at s = 1")]
    Pole,

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error(transparent)]
    Branch(#[from] BranchFailure),

    #[error("|L| = {0:.4e} is below the zero guard; log-derivative withheld")]
    DivisionGuard(f64),

    #[error("resonator Euler factor degenerate at p = {0}")]
    DegenerateFactor(u64),

    #[error("empty domain: every character is excluded")]
    EmptyDomain,

    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;

impl CoreError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        CoreError::InvalidArgument(msg.into())
    }
}
