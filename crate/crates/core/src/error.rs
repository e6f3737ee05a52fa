use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (partial value {partial}, error estimate {err_estimate:e})"
    )]
    QuadratureNonConvergence {
        partial: f64,
        err_estimate: f64,
        evaluations: usize,
    },

    #[error("integrand is not finite at abscissa {abscissa}")]
    NonFiniteIntegrand { abscissa: f64 },

    #[error("ODE step size underflow at s = {s} (singularity hit?)")]
    StepUnderflow { s: f64 },

    #[error("ODE step budget of {steps} exhausted at s = {s}")]
    StepBudgetExhausted { s: f64, steps: usize },

    #[error("finite-difference step {step:e} is dominated by cancellation")]
    CancellationDominated { step: f64 },

    #[error("degenerate node ({0}): immersion derivative vanishes")]
    DegenerateNode(String),

    #[error("isotropy violated: |Z1^2 + Z2^2 + Z3^2| = {0:e}")]
    IsotropyViolated(f64),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("missing field: {0}")]
    MissingField(&'static str),

    #[error("open meridian: {0}")]
    OpenMeridian(String),

    #[error("self-intersecting meridian between samples {0} and {1}")]
    SelfIntersection(usize, usize),

    #[error("invalid profile curve: {0}")]
    InvalidCurve(String),

    #[error("closure failure: {0}")]
    ClosureFailure(String),

    #[error("line search failed at iteration {iteration}")]
    LineSearchFailure { iteration: usize },

    #[error("malformed CSV: {0}")]
    MalformedCsv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and strictly positive",
        })
    }
}
