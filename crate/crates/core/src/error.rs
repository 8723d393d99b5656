use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum NkError {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("landscape needs {entries} table entries, above the cap of {cap}")]
    TooLarge { entries: u128, cap: u64 },

    #[error("configuration has {got} bits but the landscape has {expected} nodes")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("exhaustive enumeration is limited to n <= {cap}, got n = {n}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("meter budget must be at least 1")]
    ZeroBudget,

    #[error("invalid landscape: {0}")]
    InvalidLandscape(String),

    #[error("refusing to serialize non-finite value in `{0}`")]
    NonFinite(String),

    #[error("malformed table: {0}")]
    Parse(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = NkError> = std::result::Result<T, E>;

impl NkError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        NkError::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        NkError::Io {
            path: path.into(),
            source,
        }
    }
}
