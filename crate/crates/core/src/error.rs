//! Crate-wide error type. Solver paths that carry numeric payloads
//! (partial mode sets, residual histories) define their own failure
//! structs and convert into this enum when the payload is not needed.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh conformity: {0}")]
    MeshConformity(String),

    #[error("inverted or non-convex geometry: {0}")]
    Geometry(String),

    #[error("case load: {0}")]
    CaseLoad(String),

    #[error("singular impedance on patch '{0}': |Z| below 1e-14")]
    SingularImpedance(String),

    #[error("singular matrix: exact zero pivot at row {row}")]
    SingularMatrix { row: usize },

    #[error("no convergence: {0}")]
    NoConvergence(String),

    #[error("rational interpolation failed: {0}")]
    InterpolationFailure(String),

    #[error("oracle size cap exceeded: n = {n}, cap = {cap}")]
    OracleSize { n: usize, cap: usize },

    #[error("impedance oracle at a branch point of arctan")]
    SingularImpedanceOracle,

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<V> = std::result::Result<V, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
