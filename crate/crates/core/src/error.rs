use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("point {coords:?} outside chart domain of {model}")]
    ChartDomain { coords: Vec<f64>, model: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("tangent plane span is degenerate (gram determinant {det:e})")]
    DegenerateSpan { det: f64 },

    #[error("geodesic left the chart domain at t = {t}")]
    ChartExit { t: f64 },

    #[error("step size underflow at t = {t} integrating geodesic")]
    StepUnderflow { t: f64 },

    #[error("shooting did not converge after {iters} iterations (residual {residual:e})")]
    ShootingDiverged { iters: usize, residual: f64 },

    #[error("distance exceeds the {cap} chart-time cap")]
    DistanceCap { cap: f64 },

    #[error("busemann truncation did not reach tolerance (last gap {gap:e})")]
    BusemannTruncation { gap: f64 },

    #[error("set is empty on the search region")]
    EmptySet,

    #[error("projection is not unique at {probe:?}: {count} minimizers found")]
    NonUniqueProjection { probe: Vec<f64>, count: usize },

    #[error("no boundary found in the region")]
    NoBoundary,

    #[error("minimizer landed on the search region boundary; enlarge the region")]
    RegionTooSmall,

    #[error("{0}")]
    InvalidInput(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
