use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be finite and strictly positive, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    #[error("regime is ambiguous: a1 = {a1}, a2 = {a2} (equality with 1 is not classified)")]
    AmbiguousRegime { a1: f64, a2: f64 },

    #[error("parameters are not in the bistable regime: {0}")]
    NotBistable(String),

    #[error("diffusion ratio d = {d} lies outside the tangent window ({d_min}, {d_max})")]
    OutsideWindow { d: f64, d_min: f64, d_max: f64 },

    #[error("no tangency point in the open first quadrant")]
    NoAdmissibleTangent,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("solution left the positive cone (min component {min:e})")]
    NonPositiveSolution { min: f64 },

    #[error("explicit time step {dt:e} exceeds the stability limit {limit:e} after halving")]
    CflViolation { dt: f64, limit: f64 },

    #[error("front speed did not settle (relative drift {drift:e})")]
    NotTraveling { drift: f64 },

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),
}
