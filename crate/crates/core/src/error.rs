use thiserror::Error;

/// Errors raised by the geometry, profile, functional and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry parameters: {0}")]
    InvalidGeometry(String),

    #[error(
        "normal component nu = {nu} is not a scalar product of unit vectors (|nu| > 1 + {tol:e})"
    )]
    InvalidNormalComponent { nu: f64, tol: f64 },

    #[error("radial coordinate {u} outside [0, {radius})")]
    OutOfDomain { u: f64, radius: f64 },

    #[error("state on the rotation axis (u = {u}); start from the axis series instead")]
    AxisSingularity { u: f64 },

    #[error("step size underflow at s = {s} (h = {h:e})")]
    StepSizeUnderflow { s: f64, h: f64 },

    #[error("trajectory left the domain at s = {s} (u = {u})")]
    DomainExit { s: f64, u: f64 },

    #[error("stop condition not met within arclength {max_arclength}")]
    StopNotReached { max_arclength: f64 },

    #[error("no CMC sphere with H = {h} in E({k}, {tau}): requires {condition}")]
    ExistenceViolation {
        k: f64,
        tau: f64,
        h: f64,
        condition: &'static str,
    },

    #[error("inadmissible perturbation: {0}")]
    InadmissiblePerturbation(String),

    #[error("profile is not a closed sphere: {0}")]
    OpenProfile(String),

    #[error("sample index {index} is not interior (valid range 1..{last})")]
    NotInterior { index: usize, last: usize },

    #[error("quadrature did not reach relative error {target:e} (achieved {achieved:e})")]
    QuadratureNonConvergence { target: f64, achieved: f64 },

    #[error("malformed profile: {0}")]
    MalformedProfile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
