use thiserror::Error;

pub type Result<T> = std::result::Result<T, SgnError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SgnError {
    #[error("interval length must be positive (a = {a}, b = {b})")]
    NonPositiveLength { a: f64, b: f64 },
    #[error("at least {min} elements are required, got {got}")]
    TooFewElements { got: usize, min: usize },
    #[error("unsupported quadrature order {0} (expected 1..=16)")]
    UnsupportedOrder(usize),
    #[error("point x = {x} lies outside [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },
    #[error("dof index {index} out of range for a space with {count} dofs")]
    BadIndex { index: usize, count: usize },
    #[error("derivative of order {0} is not available for this family")]
    DerivUnsupported(u8),
    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },
    #[error("operation not supported for family {0}")]
    UnsupportedFamily(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("breakpoints must have strictly increasing x (violated at index {0})")]
    NonMonotoneBreakpoints(usize),
    #[error("smoothing radius {radius} must be below half the shortest segment ({limit})")]
    RadiusTooLarge { radius: f64, limit: f64 },
    #[error("unknown bathymetry preset '{0}'")]
    UnknownPreset(String),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("depth collapse at t = {t}: minimum depth {min_depth:e} below floor {floor:e}")]
    DepthCollapse { t: f64, min_depth: f64, floor: f64 },
    #[error("step failed at t = {t}: {source}")]
    StepFailed {
        t: f64,
        #[source]
        source: Box<SgnError>,
    },
    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),
    #[error("reference solution has (near) zero norm")]
    ZeroNormalizer,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("no crest: the surface is flat")]
    NoCrest,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),
    #[error("spaces must share one mesh")]
    SpaceMismatch,
    #[error("parse error: {0}")]
    Parse(String),
}

impl SgnError {
    /// True for failures caused by the physical state (depth collapse, loss of
    /// positive definiteness) rather than by bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            SgnError::NotPositiveDefinite { .. } | SgnError::DepthCollapse { .. } => true,
            SgnError::StepFailed { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
