use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Two input points have identical coordinates. Labels are 1-based.
    #[error("points {first} and {second} are coordinate-identical")]
    DuplicatePoint { first: u32, second: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("oracle cap exceeded: n = {n} > cap = {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("memory limit exceeded: {used_mb} MB in use, limit {limit_mb} MB")]
    ResourceLimit { used_mb: u64, limit_mb: u64 },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
