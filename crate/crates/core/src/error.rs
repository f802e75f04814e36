use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("integration failed at t = {time} ps: {reason}")]
    Integration { time: f64, reason: String },

    #[error("trajectories describe different scenarios: {0}")]
    MismatchedScenarios(String),

    #[error("window [{start}, {end}] ps lies outside the trajectory")]
    WindowOutOfRange { start: f64, end: f64 },

    #[error("series too short for spectral analysis ({len} samples, need at least {min})")]
    SeriesTooShort { len: usize, min: usize },

    #[error("indeterminate outcome: final ground {ground:.6}, final excited {excited:.6}")]
    Indeterminate { ground: f64, excited: f64 },

    #[error("pulse classification failed: {0}")]
    Classification(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 for usage/config problems, 2 for physics-level failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Integration { .. }
            | Error::Indeterminate { .. }
            | Error::Classification(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
