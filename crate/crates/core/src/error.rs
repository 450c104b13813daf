use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a rotation matrix (orthogonality/determinant defect {defect:.3e})")]
    NotRotation { defect: f64 },

    #[error("matrix is singular (reciprocal condition {rcond:.3e})")]
    Singular { rcond: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("vector outside the generic set (smallest frame singular value {sigma_min:.3e})")]
    NotGeneric { sigma_min: f64 },

    #[error("P(X,X) is not in the hull of X (reconstruction residual {residual:.3e})")]
    NotInHull { residual: f64 },

    #[error("variance mismatch between multivectors")]
    VarianceMismatch,

    #[error("degree overflow: {p} + {q} exceeds dimension {dim}")]
    DegreeOverflow { p: usize, q: usize, dim: usize },

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("sampled map is not quadratic (defect {defect:.3e})")]
    NotQuadratic { defect: f64 },

    #[error("generic rank check failed: {0}")]
    GenericRank(String),

    #[error("independent solvers disagree: {0}")]
    SolverDisagreement(String),

    #[error("integration left the finite range after t = {t_last}")]
    BlowUp { t_last: f64 },

    #[error("t = {t} is not an interior node of the sampled curve")]
    BoundaryNode { t: f64 },

    #[error("curve is not planar (max residual {residual:.3e})")]
    NotPlanar { residual: f64 },

    #[error("vanishing velocity at t = {t}")]
    VanishingVelocity { t: f64 },

    #[error("supplied derivative does not match finite differences (defect {defect:.3e})")]
    DerivativeMismatch { defect: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
