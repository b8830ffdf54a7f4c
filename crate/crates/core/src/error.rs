use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("elliptic integral of the first kind diverges at phi = pi/2, m = 1")]
    Singular,

    #[error("no sign change on bracket [{lo}, {hi}] (f = {flo}, {fhi})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        flo: f64,
        fhi: f64,
    },

    #[error("root finder did not converge within {0} iterations")]
    NoConvergence(usize),

    #[error("strain {eps} outside model range [{min}, {max}]")]
    StrainOutOfRange { eps: f64, min: f64, max: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("fold ratio {fr} outside [{lo}, {hi}]")]
    FoldRatioOutOfRange { fr: f64, lo: f64, hi: f64 },

    #[error("family member f_r = {fr} failed: {source}")]
    FamilyMember {
        fr: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    /// Malformed input data; `line` is 1-based and counts the header.
    #[error("line {line}: {msg}")]
    Data { line: usize, msg: String },

    #[error("infeasible scenario: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
