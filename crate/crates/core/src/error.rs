use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-triangle: sides ({a}, {b}, {c}) violate the triangle inequality")]
    InvalidTriangle { a: f64, b: f64, c: f64 },

    #[error("diameter-exceeded: side {side} is not below the model diameter {diameter}")]
    DiameterExceeded { side: f64, diameter: f64 },

    #[error("degenerate-vertex: the angle at a vertex with a zero-length adjacent side is undefined")]
    DegenerateVertex,

    #[error("slope-too-large: delta = {delta} must be below sinh(b) = {sinh_b}")]
    SlopeTooLarge { delta: f64, sinh_b: f64 },

    #[error("nonpositive-b: gluing level b = {0} must be positive")]
    NonpositiveB(f64),

    #[error("nonpositive-{name}: {value} must be positive")]
    Nonpositive { name: &'static str, value: f64 },

    #[error("degenerate-subinterval: [{p}, {q}]")]
    DegenerateSubinterval { p: f64, q: f64 },

    #[error("out-of-range: {0}")]
    OutOfRange(String),

    #[error("no-convergence: {0}")]
    NoConvergence(String),

    #[error("resolution-too-low: ({n_t}, {n_theta}), both must be at least 8")]
    ResolutionTooLow { n_t: usize, n_theta: usize },

    #[error("overlapping-arcs on a circle of length {0}")]
    OverlappingArcs(f64),

    #[error("grid-gap: spacing {spacing} between levels exceeds {threshold}")]
    GridGap { spacing: f64, threshold: f64 },

    #[error("missing-surface-data")]
    MissingSurfaceData,

    #[error("isotopy-undefined: {0}")]
    IsotopyUndefined(String),

    #[error("band-too-thin: w - b = {0}")]
    BandTooThin(f64),

    #[error("invalid-descriptor: {0}")]
    InvalidDescriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
