use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the registration library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weights are all zero")]
    DegenerateWeights,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate triad: points are coincident or colinear")]
    DegenerateTriad,

    #[error("quaternion norm {norm} is too far from 1")]
    Normalization { norm: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("no consensus after {samples_drawn} samples ({pool_size} candidate sets pooled)")]
    NoConsensus { samples_drawn: u64, pool_size: usize },

    #[error("every correspondence was trimmed at iteration {iteration}")]
    AllTrimmed { iteration: usize },

    #[error("duality gap undefined: recovered objective {f_hat} but lower bound {f_star}")]
    UndefinedGap { f_hat: f64, f_star: f64 },

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Strips stage labels and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}
