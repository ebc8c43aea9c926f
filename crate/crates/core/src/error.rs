use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("unsupported fan: {0}")]
    UnsupportedFan(String),

    #[error("duality unavailable: {0}")]
    DualityUnavailable(String),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeError { expected: (usize, usize), found: (usize, usize) },

    #[error("gluing error: {0}")]
    GluingError(String),

    #[error("unsupported gluing class: {0}")]
    UnsupportedGluing(String),

    #[error("not a family: {0}")]
    NotAFamily(String),

    #[error("maps are not transverse")]
    NotTransverse,

    #[error("integral vector surjectivity fails on face {face}: {reason}")]
    IntegralVectorSurjectivityFailure { face: usize, reason: String },

    #[error("quadrature did not converge: {0}")]
    DivergenceSuspected(String),

    #[error("form degree {degree} exceeds chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },

    #[error("form error: {0}")]
    Form(String),

    #[error("invalid manifest:\n{}", .0.iter().map(|e| format!("  - {e}")).collect::<Vec<_>>().join("\n"))]
    InvalidManifest(Vec<ManifestIssue>),

    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
}

/// One violated structural rule of a cover manifest.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestIssue {
    #[error("overlap {subset:?} references unknown chart {chart}")]
    UnknownChart { subset: Vec<String>, chart: String },

    #[error("InconsistentNerve: overlap {subset:?} is listed but its face {missing:?} is not")]
    InconsistentNerve { subset: Vec<String>, missing: Vec<String> },

    #[error("DimensionMismatch: {subset:?} has total dimension {found}, expected {expected}")]
    DimensionMismatch { subset: Vec<String>, expected: usize, found: usize },

    #[error("{subset:?}: polytope is empty")]
    EmptyPolytope { subset: Vec<String> },

    #[error("{subset:?}: declared quadrant-class but unbounded rank {k} < {m}")]
    NotQuadrant { subset: Vec<String>, k: usize, m: usize },

    #[error("{subset:?}: gluing map from {chart}: {reason}")]
    BadGluing { subset: Vec<String>, chart: String, reason: String },

    #[error("{subset:?}: missing gluing map from member {chart}")]
    MissingMap { subset: Vec<String>, chart: String },

    #[error("{subset:?}: overlap must have at least two members")]
    TrivialOverlap { subset: Vec<String> },
}
