use thiserror::Error;

/// Errors raised by the geometry engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid curvature pair c1={c1}, c2={c2}: need c1 > c2 > 0")]
    InvalidParams { c1: f64, c2: f64 },

    #[error("point is off the manifold (residual {residual:e})")]
    OffManifold { residual: f64 },

    #[error("vector is not tangent to the product (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("degenerate induced metric (det g = {det:e})")]
    DegenerateMetric { det: f64 },

    #[error("chart is not conformal (defect {defect:e})")]
    NotConformal { defect: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation inside the pole band (|x| = {x} > {band})")]
    PoleBand { x: f64, band: f64 },

    #[error("mean curvature too small for this identity (|H| = {norm:e} <= {eps:e})")]
    NearZeroMeanCurvature { norm: f64, eps: f64 },

    #[error("numerical breakdown: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
