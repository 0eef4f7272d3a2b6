use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {z} is not inside the open unit disk")]
    OutsideDisk { z: Complex64 },

    #[error("curve needs at least {minimum} samples, got {requested}")]
    TooFewSamples { requested: usize, minimum: usize },

    #[error("point {point} lies on the symbol curve (distance {distance:e})")]
    OnCurve { point: Complex64, distance: f64 },

    #[error("symbol curve is degenerate (all samples coincide)")]
    DegenerateCurve,

    #[error("section order must be at least {minimum}, got {order}")]
    InvalidOrder { order: usize, minimum: usize },

    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix dimensions {rows}x{cols} do not match {len} entries")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is exactly singular")]
    Singular,

    #[error("region is empty")]
    EmptyRegion,

    #[error("grid needs at least 2x2 nodes, got {nx}x{ny}")]
    InvalidGrid { nx: usize, ny: usize },

    #[error("ladder needs at least {minimum} rungs, got {len}")]
    LadderTooShort { len: usize, minimum: usize },

    #[error("ladder must be strictly increasing")]
    LadderNotIncreasing,

    #[error("need at least {minimum} sample points, got {len}")]
    InsufficientSamples { len: usize, minimum: usize },

    #[error("sample point {point} is not in the unbounded Fredholm component")]
    SampleOutsideF0 { point: Complex64 },

    #[error("least-squares fit is degenerate: sample distances do not vary")]
    DegenerateFit,

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
