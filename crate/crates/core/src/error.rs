use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("query on an empty box")]
    EmptyBox,

    #[error("unsplittable box: every component is degenerate")]
    UnsplittableBox,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("constraint references variable {index} but the system has {dim} variables")]
    VariableOutOfRange { index: usize, dim: usize },

    #[error("invalid robot model: {0}")]
    InvalidModel(String),

    #[error("invalid pose target: {0}")]
    InvalidTarget(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("transform is not a rigid motion: {0}")]
    NonOrthonormal(String),

    #[error(
        "off-manifold transform: relative motion deviates from the joint axis by {deviation:.3e}"
    )]
    OffManifold { deviation: f64 },

    #[error("local IK did not converge after {iterations} iterations (pose error {error:.3e})")]
    NotConverged { iterations: usize, error: f64 },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
