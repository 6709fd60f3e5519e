use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Malformed or out-of-range input supplied by the caller.
    #[error("invalid input: {0}")]
    Input(String),
    #[error("measure error: {0}")]
    Measure(String),
    #[error("box has zero measure")]
    ZeroMeasure,
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Descent went deeper than the cap; carries the ladder-like evidence.
    #[error("descent depth cap {cap} exceeded: {evidence}")]
    DepthCap { cap: usize, evidence: String },
    /// Cross-refinement could not reach a Σ-free homogeneous partition.
    #[error("excellence surrogate insufficient: {0}")]
    SurrogateInsufficient(String),
    /// A post-condition the construction guarantees did not hold.
    #[error("internal verification failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
