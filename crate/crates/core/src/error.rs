use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("fields or kernels live on different geometries")]
    GeometryMismatch,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("no odd mode with eigenvalue <= {lambda_sq}: cutoff below the odd-mode threshold (smallest odd eigenvalue {smallest_odd})")]
    NoOddModeBelowCutoff { lambda_sq: f64, smallest_odd: f64 },

    #[error("constraint map is numerically rank deficient: singular value {singular_value:e} at index {index} (largest {largest:e})")]
    RankDeficient {
        singular_value: f64,
        index: usize,
        largest: f64,
    },

    #[error("construction failed: {reason} (best value {best:e})")]
    ConstructionFailed { reason: String, best: f64 },

    #[error("fit failed: residual {residual:e} exceeds bound {bound:e}")]
    FitFailed { residual: f64, bound: f64 },

    #[error("test function {index} leaks {leakage:e} of its norm outside the plus region")]
    TestSupport { index: usize, leakage: f64 },

    #[error("matrix is not symmetric: defect {defect:e}")]
    NotSymmetric { defect: f64 },

    #[error("degenerate importance weights: effective sample size {ess:.3}")]
    DegenerateWeights { ess: f64 },

    #[error("linear algebra failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors that signal a failed witness construction rather than
    /// bad input.
    pub fn is_construction_failure(&self) -> bool {
        matches!(
            self,
            Error::ConstructionFailed { .. }
                | Error::FitFailed { .. }
                | Error::RankDeficient { .. }
                | Error::NoOddModeBelowCutoff { .. }
        )
    }
}
