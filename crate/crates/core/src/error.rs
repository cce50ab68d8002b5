use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("{op}: argument outside domain ({reason})")]
    Domain { op: &'static str, reason: String },

    #[error("{op}: precondition violated ({reason})")]
    Precondition { op: &'static str, reason: String },

    #[error("need at least 2 points, got {0}")]
    TooFewPoints(usize),

    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },

    #[error(
        "quadrature did not converge: estimated error {achieved:e} exceeds tolerance {requested:e} after {evaluations} evaluations"
    )]
    Quadrature {
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    #[error("{0} is empty")]
    Empty(&'static str),

    #[error("records carry no containment flags")]
    MissingContainmentFlags,

    #[error("no calibrated E_n bound constant for dimension {0}")]
    Uncalibrated(usize),

    #[error("invalid experiment config: {0}")]
    Config(String),

    #[error("records schema mismatch: missing columns {missing:?}")]
    Schema { missing: Vec<String> },

    #[error("malformed records file: {0}")]
    Records(String),

    #[error("trial {trial} at n={n}: {source}")]
    Trial {
        n: u64,
        trial: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn precondition(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Precondition {
            op,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input or configuration rather than a
    /// failure during computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::Domain { .. }
                | Error::Precondition { .. }
                | Error::Config(_)
                | Error::Schema { .. }
                | Error::Empty(_)
                | Error::Records(_)
        )
    }
}
