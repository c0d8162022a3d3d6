use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("jet shape mismatch: {0}")]
    JetShape(String),
    #[error("jet domain error: {0}")]
    JetDomain(String),
    #[error("multi-index of total degree {degree} exceeds jet order {order}")]
    JetIndex { degree: usize, order: usize },
    #[error("vector is not tangent at the base point (residual {0:.3e})")]
    NotTangent(f64),
    #[error("point is not on the unit sphere (|x| = {0})")]
    NotOnSphere(f64),
    #[error("vector is not normal to the submanifold (residual {0:.3e})")]
    NotNormal(f64),
    #[error("immersion is not Lagrangian (totally-real residual {0:.3e})")]
    NotLagrangian(f64),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("degenerate differential: smallest singular value {0:.3e}")]
    DegenerateDifferential(f64),
    #[error("degenerate plane specification")]
    DegeneratePlane,
    #[error("curvature paths disagree (residual {0:.3e}); immersion non-Lagrangian or numerically bad")]
    CurvatureMismatch(f64),
    #[error("surface leaves the hyperplane of its ambient normal (residual {0:.3e})")]
    NotInS5(f64),
    #[error("rank gap ambiguous in singular spectrum: {0}")]
    RankAmbiguous(String),
    #[error("ellipse test requires a minimal surface (|H| = {0:.3e})")]
    NotMinimal(f64),
    #[error("optimization failed: {0}")]
    Optimization(String),
    #[error("unknown catalog id `{0}`")]
    UnknownCatalog(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
