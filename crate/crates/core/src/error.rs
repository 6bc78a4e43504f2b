use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside the admissible domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid regulated function: {0}")]
    InvalidFunction(String),

    #[error("unsupported integrator: {0}")]
    UnsupportedIntegrator(String),

    #[error("unknown model id `{0}`")]
    UnknownModel(String),

    #[error("unknown test function id `{0}`")]
    UnknownFunction(String),

    #[error("invalid parameters for `{model}`: {reason}")]
    InvalidParameter { model: String, reason: String },

    #[error("growth constraint violated: a = {a} must be < 1/(4*lambda) = {bound}")]
    GrowthViolation { a: f64, bound: f64 },

    #[error("covariance factorization failed (last jitter {jitter:e})")]
    Factorization { jitter: f64 },

    #[error("{what} did not converge (last estimate {estimate}, error estimate {error:e})")]
    NotConverged {
        what: &'static str,
        estimate: f64,
        error: f64,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            what,
            value,
            domain: format!("[{lo}, {hi}]"),
        }
    }

    pub(crate) fn param(model: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            model: model.to_string(),
            reason: reason.into(),
        }
    }
}
