use thiserror::Error;

pub type Result<T> = std::result::Result<T, SdwtError>;

#[derive(Debug, Error)]
pub enum SdwtError {
    /// `|s|^2 - |r|^2 - 1` is off the constraint surface.
    #[error("symplectic constraint violated: |s|^2 - |r|^2 - 1 = {0:e}")]
    ConstraintViolation(f64),

    #[error("hyperbolic modulus must be non-negative, got {0}")]
    NegativeModulus(f64),

    #[error("dilation must be non-zero")]
    ZeroDilation,

    #[error("operation needs a positive dilation, got {0}")]
    NonPositiveDilation(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("quadrature error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    QuadratureDivergence { estimate: f64, tolerance: f64 },

    /// For boundary checks `ratio` is boundary/accumulated and must stay below
    /// `limit`; for quadrature radii it is the radius and must reach `limit`.
    #[error("cutoff too small: measured {ratio:e} against limit {limit:e}")]
    CutoffTooSmall { ratio: f64, limit: f64 },

    #[error("admissibility integral vanishes; wavelet cannot be normalized")]
    ZeroAdmissibility,

    #[error("grid too coarse: requested {requested} exceeds Nyquist extent {nyquist}")]
    GridTooCoarse { requested: f64, nyquist: f64 },

    #[error("sampling too sparse: {0}")]
    SamplingTooSparse(String),

    #[error("Fock truncation tail {tail:e} exceeds {limit:e}")]
    TruncationOverflow { tail: f64, limit: f64 },

    #[error("matrix is not unimodular: AD - BC - 1 = {0:e}")]
    NotUnimodular(f64),

    #[error("B = 0: lens-only system has no Fresnel kernel, use the scaling path")]
    ZeroB,

    #[error("degenerate denominator: s + r is real")]
    DegenerateDenominator,

    #[error("at point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<SdwtError>,
    },

    #[error("bad slice: {0}")]
    BadSlice(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl SdwtError {
    /// Short machine-readable tag, used in the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            SdwtError::ConstraintViolation(_) => "ConstraintViolation",
            SdwtError::NegativeModulus(_) => "NegativeModulus",
            SdwtError::ZeroDilation => "ZeroDilation",
            SdwtError::NonPositiveDilation(_) => "NonPositiveDilation",
            SdwtError::InvalidGrid(_) => "InvalidGrid",
            SdwtError::NonFinite(_) => "NonFinite",
            SdwtError::ShapeMismatch { .. } => "ShapeMismatch",
            SdwtError::QuadratureDivergence { .. } => "QuadratureDivergence",
            SdwtError::CutoffTooSmall { .. } => "CutoffTooSmall",
            SdwtError::ZeroAdmissibility => "ZeroAdmissibility",
            SdwtError::GridTooCoarse { .. } => "GridTooCoarse",
            SdwtError::SamplingTooSparse(_) => "SamplingTooSparse",
            SdwtError::TruncationOverflow { .. } => "TruncationOverflow",
            SdwtError::NotUnimodular(_) => "NotUnimodular",
            SdwtError::ZeroB => "ZeroB",
            SdwtError::DegenerateDenominator => "DegenerateDenominator",
            SdwtError::AtPoint { source, .. } => source.kind(),
            SdwtError::BadSlice(_) => "BadSlice",
            SdwtError::Parse(_) => "Parse",
            SdwtError::Io(_) => "Io",
            SdwtError::Json(_) => "Json",
        }
    }
}
