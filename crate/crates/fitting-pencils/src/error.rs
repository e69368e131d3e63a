use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("degenerate basis: {0}")]
    DegenerateBasis(String),
    #[error("rank-deficient frame: smallest/largest singular value {0:.3e}")]
    RankDeficientFrame(f64),
    #[error("not positive definite: λ_min = {0:.3e}")]
    NotPositiveDefinite(f64),
    #[error("lagrangians not transverse: σ_min/σ_max = {0:.3e}")]
    NotTransverse(f64),
    #[error("loop continuation ambiguous at sample {index}: gap {gap:.3e}")]
    Continuation { index: usize, gap: f64 },
    #[error("not a Schottky configuration: {0}")]
    NotSchottky(String),
    #[error("not symplectic: residual {0:.3e}")]
    NotSymplectic(f64),
    #[error("search exhausted: {0}")]
    Exhausted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
