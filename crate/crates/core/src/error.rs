use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Param(String),

    #[error("search universe has {required} vertices, above the cap of {cap}")]
    CapExceeded { required: String, cap: u64 },

    #[error("inner code over J({m},{w}) with half-distance {f} has {size} word(s); need at least 2")]
    AlphabetTooSmall { m: usize, w: usize, f: usize, size: usize },

    #[error("outer length {n} exceeds the maximum feasible length {max_n}")]
    Infeasible { n: usize, max_n: usize },

    #[error("decoding failed: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
}
