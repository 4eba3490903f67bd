use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what}: {count} exceeds the configured limit of {limit}")]
    Resource { what: String, count: u128, limit: u128 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sample sets disagree on `{field}`")]
    Mismatch { field: &'static str },

    #[error("empty sample set")]
    EmptySet,

    #[error("ill-conditioned fit (condition number {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("maximum lies on the boundary of the {axis} grid at {at}; extend the grid")]
    PeakAtBoundary { axis: &'static str, at: f64 },

    #[error("energy {energy} is unreachable: no states with this energy")]
    UnreachableEnergy { energy: u64 },

    #[error("spectrum is not on an integer energy grid: {0}")]
    NonIntegerGrid(String),

    #[error("malformed sample file, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
