use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vector is not unit length (|v| = {norm})")]
    NonUnitVector { norm: f64 },

    #[error("vectors are not an orthonormal pair (dot = {dot:e})")]
    NonOrthogonalPair { dot: f64 },

    #[error("z-axis is not an eigenvector (off-axis magnitude {off_axis:e})")]
    ZAxisNotEigenvector { off_axis: f64 },

    #[error("surface-energy regime is bounded; no unbounded witness exists")]
    BoundedRegime,

    #[error("operation is not defined for the unbounded regime")]
    UnboundedRegime,

    #[error("no unbounded witness found after scaling to {max_scale:e}")]
    NoWitnessFound { max_scale: f64 },

    #[error("elastic constants (M2 = {m2}, M3 = {m3}) violate the coercivity bounds")]
    NonCoercive { m2: f64, m3: f64 },

    #[error("field is not D-valued at node ({i}, {j}): fs0 = {fs0:e}")]
    NotDValued { i: usize, j: usize, fs0: f64 },

    #[error("energy diverged (non-finite value at iteration {iter})")]
    Diverged { iter: usize },

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("field file error: {0}")]
    FieldFormat(String),

    #[error("invalid anchoring parameters: {0}")]
    Anchoring(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
