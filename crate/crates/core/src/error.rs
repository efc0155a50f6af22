use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported derivative order {0} (max 3)")]
    UnsupportedDerivative(usize),
    #[error("genericity failure: {0}")]
    Genericity(String),
    #[error("NONTRANSVERSE root at {location}: condition number {cond:.3e}")]
    NonTransverse { location: String, cond: f64 },
    #[error("UNRESOLVED-EVENT near t = {t}: {detail}")]
    Unresolved { t: f64, detail: String },
    #[error("strict inequality tie ({what}) at {location}: margin {margin:.3e}")]
    InequalityTie {
        what: String,
        location: String,
        margin: f64,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("parse error at byte {offset}: {msg}")]
    Parse { offset: usize, msg: String },
    #[error("invalid input: {0}")]
    Input(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for genericity problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Genericity(_)
            | Error::NonTransverse { .. }
            | Error::Unresolved { .. }
            | Error::InequalityTie { .. }
            | Error::Construction(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
