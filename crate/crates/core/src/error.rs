use thiserror::Error;

/// Errors shared across the solver and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("band [{lo}, {hi}] outside grid domain [0, {r_max}]")]
    BandOutsideGrid { lo: f64, hi: f64, r_max: f64 },

    #[error("radius {r} outside grid domain [0, {r_max}]")]
    RadiusOutsideGrid { r: f64, r_max: f64 },

    #[error("expected {expected} formulation, got {got}")]
    Formulation { expected: &'static str, got: &'static str },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("zero field where a nonzero field is required")]
    ZeroField,

    #[error("invalid solver config: {0}")]
    SolverConfig(String),

    #[error("trajectory too short: need {need} snapshots, have {have}")]
    ShortTrajectory { need: usize, have: usize },

    #[error("cone leaves the grid or the trajectory time range: {0}")]
    ConeOutsideDomain(String),

    #[error("field tail does not decay; inequality suite not verifiable")]
    NonDecayingTail,

    #[error("operation requires a uniform grid")]
    NonUniformGrid,

    #[error("{0}")]
    Numerics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("snapshot parse error: {0}")]
    SnapshotParse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
