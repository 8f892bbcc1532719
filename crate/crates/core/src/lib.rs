//! A-priori bounds for traveling waves of diffusive Lotka-Volterra
//! competition systems.
//!
//! The crate is organised around the two-species scaled system
//!
//! ```text
//! u_t =   u_yy +   u (1 - u - a1 v)
//! v_t = d v_yy + k v (1 - a2 u - v)
//! ```
//!
//! and its raw (unscaled) counterpart with diffusion rates `d1, d2`, growth
//! rates `sigma1, sigma2` and competition matrix `c_ij`.
//!
//! - [`model`]: parameter sets, scaling, equilibria and regime classification.
//! - [`barrier`]: N-barrier constructions and the closed-form bounds on
//!   `q = alpha u + d beta v` (and the unscaled and generalized variants).
//! - [`tangent`]: the sharper lower bound obtained from the tangent line to
//!   the conic `F(u, v) = 0`.
//! - [`waves`]: numerical traveling-wave profiles (Newton on a finite
//!   difference discretisation, plus a method-of-lines oracle) and pointwise
//!   verification of every bound along a computed profile.
//! - [`nonexist`]: the three-species nonexistence criterion.

pub mod barrier;
mod error;
pub mod model;
pub mod nonexist;
pub mod tangent;
pub mod waves;

pub use barrier::{
    bounds_general, bounds_scaled, bounds_unscaled, f_eval, hyperbola_check, lower_barrier_scaled,
    upper_barrier_scaled, Barrier, BoundPair, CaseTag, Direction, GeneralBounds,
    GeneralNullclineBox, Segment, Weights,
};
pub use error::{Error, Result};
pub use model::{
    classify, equilibria, scale, Equilibria, RegimeCase, ScaleMap, ScaledParams,
    ThreeSpeciesParams, UnscaledParams,
};
pub use nonexist::{check, reduced_system_margin, sweep, ThreeSpeciesVerdict, Verdict};
pub use tangent::{
    sharp_lower_bound, solve_tangent, sum_bounds, window, TangentRoot, TangentSolution,
};
pub use waves::{
    bound_verify, march_oracle, residual, solve_wave, SolverConfig, VerificationReport,
    WaveProfile,
};
