use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("regime {regime} is not stationary (smallest root modulus {min_modulus:.6})")]
    NonStationaryRegime { regime: usize, min_modulus: f64 },

    #[error("regime {0} has zero probability")]
    DegenerateRegime(usize),

    #[error("unconditional variance is not positive ({0:e})")]
    DegenerateVariance(f64),

    #[error("need {needed} past observations, got {got}")]
    InsufficientHistory { needed: usize, got: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("singular design matrix: {0}")]
    SingularDesign(String),

    #[error("no candidate structure satisfies the per-regime sample floor")]
    NoFeasibleCandidate,

    #[error("regime {0} receives no observations")]
    EmptyRegime(usize),

    #[error("degenerate residuals: {0}")]
    DegenerateResiduals(String),

    #[error("volatility at index {0} is not strictly positive")]
    NonPositiveVolatility(usize),

    #[error("regressor has zero variance")]
    DegenerateRegressor,

    #[error("conditional covariance is not positive definite at t = {t}")]
    NonPositiveDefinite { t: usize },

    #[error("malformed CSV {path}: {reason}")]
    MalformedCsv { path: String, reason: String },

    #[error("non-positive price {price} on {date} in {path}")]
    NonPositivePrice { path: String, date: String, price: f64 },

    #[error("series {0} is empty")]
    EmptySeries(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Pipeline {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Pipeline { context: context.into(), source: Box::new(self) }
    }

    /// Process exit code: 1 for configuration and input problems, 2 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::InvalidSpec(_)
            | Error::InvalidInput(_)
            | Error::MalformedCsv { .. }
            | Error::NonPositivePrice { .. }
            | Error::EmptySeries(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Csv(_) => 1,
            Error::Pipeline { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}
