use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("orbit hit the proper transform of the invariant axis at step {step}")]
    ChartExit { step: usize },

    #[error("orbit stopped early at step {step} ({reason})")]
    EarlyStop { step: usize, reason: String },

    #[error("Newton inversion failed: {0}")]
    InversionFailure(String),

    #[error("no convergence within {n_max} steps (last increment {last_increment:.3e})")]
    NoConvergence { n_max: usize, last_increment: f64 },

    #[error("tau estimate indistinguishable from zero (|tau| = {0:.3e})")]
    DegenerateFiber(f64),

    #[error("no basin entry within {n_max} steps")]
    NotInOmega { n_max: usize },

    #[error("sampling failure: {0}")]
    Sampling(String),

    #[error("radius search failure: {0}")]
    SearchFailure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
