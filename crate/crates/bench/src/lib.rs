//! Parameter sets shared by the benchmarks.

use nbarrier_core::{ScaledParams, SolverConfig, Weights};

/// The running example: `a1 = 2, a2 = 3, d = 2, k = 1` with weights `(17, 18)`.
pub fn example() -> (ScaledParams, Weights) {
    (
        ScaledParams::new(2.0, 3.0, 2.0, 1.0).expect("valid parameters"),
        Weights::new(17.0, 18.0).expect("valid weights"),
    )
}

/// A coarse grid that keeps one solve in the millisecond range.
pub fn small_config() -> SolverConfig {
    SolverConfig {
        half_length: 25.0,
        intervals: 500,
        ..SolverConfig::default()
    }
}
