use thiserror::Error;

/// Everything that can go wrong while building curves, frames and partner curves.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("vector is lightlike (|<x,x>| = {norm_sq:e} inside the null band)")]
    NullVector { norm_sq: f64 },
    #[error("tangent is lightlike at node {node} (t = {t})")]
    LightlikeTangent { node: usize, t: f64 },
    #[error("arc length is not strictly increasing at node {node}")]
    NonMonotone { node: usize },
    #[error("grid too small: {len} nodes, need at least {min}")]
    GridTooSmall { len: usize, min: usize },
    #[error("direction field is not unit at node {node} (|<X,X>| = {norm_sq})")]
    NonUnitField { node: usize, norm_sq: f64 },
    #[error("Frenet frame undefined at node {node}: curvature {kappa:e} below threshold")]
    FrameUndefined { node: usize, kappa: f64 },
    #[error("principal normal is lightlike at node {node}")]
    LightlikeNormal { node: usize },
    #[error("curve type changes along the curve (node 0 is {first}, node {node} is {other})")]
    MixedType {
        node: usize,
        first: String,
        other: String,
    },
    #[error("case {case} of the {kind} construction does not apply to a {curve_type} donor")]
    CaseMismatch {
        kind: String,
        case: String,
        curve_type: String,
    },
    #[error("partner curvature degenerate: only {valid} of {total} nodes have kappa_bar above threshold")]
    DegenerateKappaBar { valid: usize, total: usize },
    #[error("curvature degenerate at node {node}")]
    DegenerateKappa { node: usize },
    #[error("negative radicand {value:e} at node {node}")]
    RadicandNegative { node: usize, value: f64 },
    #[error("no slant-helix variant has a positive radicand over the whole curve")]
    NoApplicableVariant,
    #[error("grids differ: {left} vs {right} nodes or mismatched spacing")]
    GridMismatch { left: usize, right: usize },
    #[error("unknown curve '{0}'")]
    UnknownCurve(String),
    #[error("parameter '{name}' = {value} out of range: {reason}")]
    ParamOutOfRange {
        name: String,
        value: f64,
        reason: String,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("nothing to plot: empty curve list")]
    EmptyCurveList,
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl GeometryError {
    /// Usage-type errors: bad names, parameters or combinations supplied by the caller.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            GeometryError::UnknownCurve(_)
                | GeometryError::ParamOutOfRange { .. }
                | GeometryError::CaseMismatch { .. }
                | GeometryError::InvalidArgument(_)
                | GeometryError::EmptyCurveList
        )
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        GeometryError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;
