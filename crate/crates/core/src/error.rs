use thiserror::Error;

/// Errors raised by the analysis pipeline and its ingestion layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MfdfaError {
    #[error("series too short: need at least {required} points, got {actual}")]
    SeriesTooShort { required: usize, actual: usize },

    #[error("non-finite value at index {index}")]
    NonFiniteInput { index: usize },

    #[error("segment {segment} of length {scale} lies outside a profile of length {len}")]
    SegmentOutOfRange { scale: usize, segment: usize, len: usize },

    #[error("polynomial fit of order {order} is degenerate on {points} points")]
    DegenerateFit { order: usize, points: usize },

    #[error("zero-variance segment at scale {scale}, offset {offset} (q = {q})")]
    ZeroVarianceSegment { scale: usize, offset: usize, q: f64 },

    #[error("invalid scale grid: {0}")]
    InvalidScaleGrid(String),

    #[error("invalid q grid: {0}")]
    InvalidQGrid(String),

    #[error("need at least {required} scales in the fit range, found {found}")]
    InsufficientScales { required: usize, found: usize },

    #[error("q grid has {0} points; the Legendre transform needs at least 3")]
    GridTooSmall(usize),

    #[error("degenerate spectrum: alpha range {range:.3e} below threshold")]
    DegenerateSpectrum { range: f64 },

    #[error("spectrum has {0} points; the quartic fit needs at least 7")]
    TooFewSpectrumPoints(usize),

    #[error("fitted quartic has no interior maximum")]
    NoMaximum,

    #[error("fitted quartic has no real root left of alpha0 = {alpha0:.4}")]
    NoRealRootLeft { alpha0: f64 },

    #[error("fitted quartic has no real root right of alpha0 = {alpha0:.4}")]
    NoRealRootRight { alpha0: f64 },

    #[error("malformed header: {0}")]
    MalformedHeader(String),

    #[error("line {line}: cannot parse date {value:?}")]
    UnparsableDate { line: usize, value: String },

    #[error("line {line}: cannot parse close {value:?}")]
    UnparsableClose { line: usize, value: String },

    #[error("line {line}: close {value} is not positive")]
    NonPositiveClose { line: usize, value: f64 },

    #[error("duplicate date {0}")]
    DuplicateDate(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error("window of {window} points exceeds series of {len}")]
    WindowLargerThanSeries { window: usize, len: usize },

    #[error("invalid window plan: {0}")]
    InvalidWindowPlan(String),

    #[error("every window failed; first error: {0}")]
    AllWindowsFailed(Box<MfdfaError>),

    #[error("traces share no common windows")]
    NoCommonWindows,

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("circulant embedding is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    SynthesisFailure { min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, MfdfaError>;
