use thiserror::Error;

/// Failures of the model geometry.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({re}, {im}) is not strictly inside the unit disk")]
    NotInterior { re: f64, im: f64 },
    #[error("half-plane point ({x}, {y}) must have positive imaginary part")]
    NotInHalfPlane { x: f64, y: f64 },
    #[error("endpoints coincide")]
    CoincidentEndpoints,
    #[error("angle is undefined: a direction point equals the base point")]
    DegenerateAngle,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Failures of group arithmetic and orbit enumeration.
#[derive(Debug, Error)]
pub enum GroupError {
    #[error("matrix has determinant {det}, expected 1 within {tolerance}")]
    BadDeterminant { det: f64, tolerance: f64 },
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("element is not axial (|trace| = {abs_trace})")]
    NotAxial { abs_trace: f64 },
    #[error("the identity has no distinguished fixed points")]
    IdentityInput,
    #[error("generator list is empty")]
    NoGenerators,
    #[error("generator {index} is the identity")]
    IdentityGenerator { index: usize },
    #[error("too many generators ({0}); at most 26 are supported")]
    TooManyGenerators(usize),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("element budget of {budget} exhausted before the ball of radius {radius} was complete")]
    BudgetExceeded {
        budget: usize,
        radius: f64,
        partial: Box<crate::orbit::OrbitBall>,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Failures of Poincaré-series estimation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("need at least {needed} nonempty annuli, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("no sign change of the tail growth rate on the exponent grid (all {0})")]
    NoCrossing(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("weight table is not admissible: {0}")]
    BadWeight(String),
}

/// Failures of the boundary-measure layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("orbit ball is empty")]
    EmptyBall,
    #[error("bin count {0} outside [64, 65536]")]
    BadBinCount(usize),
    #[error("bin counts differ: {0} vs {1}")]
    BinMismatch(usize, usize),
    #[error("histogram carries no mass")]
    Degenerate,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Failures of the flow-dynamics layer and the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum FlowError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("rejection envelope violated: density {density} exceeds envelope {envelope}")]
    EnvelopeViolation { density: f64, envelope: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Errors surfaced by configuration loading and the report commands.
#[derive(Debug, Error)]
pub enum ReportError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}
