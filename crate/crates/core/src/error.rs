use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point or state lies where the density is zero or outside the support.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The integrator met a non-finite velocity.
    #[error("integration failed at step {step}: non-finite velocity at {point:?}")]
    Integration { step: usize, point: Vec<f64> },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("degenerate trace: total dwell time is zero")]
    DegenerateTrace,

    #[error("degenerate conditional on axis {axis}: all masses are zero")]
    DegenerateConditional { axis: usize },

    #[error("state space of {states} states exceeds the limit of {limit}")]
    Capacity { states: u128, limit: u128 },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("ingestion error at row {row}: {message}")]
    Ingestion { row: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from the inputs of a run (config, data files)
    /// rather than from the run itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::Ingestion { .. }
                | Error::Capacity { .. }
                | Error::Argument(_)
        )
    }
}
