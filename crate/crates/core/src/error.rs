use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported cube specification: {0}")]
    UnsupportedSpec(String),

    #[error("move {mv} is not a generator of {spec}")]
    MoveMismatch { mv: String, spec: String },

    #[error("cannot parse move `{0}`")]
    BadMove(String),

    #[error("invalid facelet string: {0}")]
    BadFacelets(String),

    #[error("memory budget exhausted while building level {level} (reached level {reached})")]
    BudgetExceeded { level: usize, reached: usize },

    #[error("frontier sample too small: relative CI {ci:.3} at depth {depth} exceeds 0.5")]
    SampleTooSmall { depth: usize, ci: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("degenerate fit: {0}")]
    Degenerate(String),

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("{0} malformed record row(s); first: {1}")]
    Malformed(usize, String),

    #[error("empty graph")]
    EmptyGraph,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
