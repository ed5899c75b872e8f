use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("degenerate triangle: {0}")]
    DegenerateTriangle(String),

    /// A coding bug surfaced by a self-check, never a mathematical outcome.
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("points not in general position: orientation of {0:?} is zero")]
    GeneralPositionFailure([usize; 4]),

    #[error(
        "configuration not flat enough to develop: max deviation {max_deviation:e} > {required:e}"
    )]
    NotFlatEnough { max_deviation: f64, required: f64 },

    #[error("slice chaining left {open_chains} open chain(s) on an embedded configuration")]
    ChainingFailure { open_chains: usize },

    #[error("singular jacobian: |det| = {det:e}")]
    SingularMatrix { det: f64 },

    #[error("newton did not converge after {iterations} iterations (deviation {deviation:e})")]
    NoConvergence { iterations: usize, deviation: f64 },

    #[error("no embedded sample found after {attempts} attempts")]
    SamplingExhausted { attempts: usize },

    #[error("insufficient precision: have {have} digits, need {need}")]
    InsufficientPrecision { have: u32, need: u32 },

    #[error("invalid search spec: {0}")]
    InvalidSearchSpec(String),

    #[error("no separation certificate for faces ({}, {}); best margin {best_margin}", .pair.0, .pair.1)]
    NoCertificateFound {
        pair: (usize, usize),
        best_margin: String,
    },

    #[error("bound violated: {0}")]
    BoundViolated(String),

    #[error("existence chain broken at link `{link}`: {detail}")]
    ChainBroken { link: String, detail: String },

    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
