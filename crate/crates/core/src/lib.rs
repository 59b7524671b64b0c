//! Capacity of the hard-decision noise-free CDMA downlink.
//!
//! A codeword `x ∈ {±1}^K` is usable on this channel when slicing every
//! matched-filter output returns the transmitted bit, i.e. `x_k · y_k > 0`
//! with `y_k = x_k + Σ_{i≠k} ρ_ki x_i`. Two views of the number of usable
//! codewords live here:
//!
//! * [`theory`] solves the large-system saddle point and evaluates the
//!   asymptotic capacity `C_∞(β)` in closed form.
//! * [`simulator`] draws random ±1 spreading matrices and counts usable
//!   codewords exactly by Gray-code enumeration, giving the finite-size
//!   capacity `C_K = log₂(count) / K`.
//!
//! The crate is `no_std` and only needs `alloc`. IO, the command line and
//! thread pools live in the `cdma-lab` crate.
#![no_std]

extern crate alloc;

mod error;
pub mod gaussian;
pub mod simulator;
pub mod stats;
pub mod theory;

pub use error::{Error, Result};
pub use gaussian::{gaussian_tail, q_ratio};
pub use simulator::{
    correlate, count_valid_fast, count_valid_naive, count_valid_partitioned, generate_spreading,
    is_valid, matched_filter, run_simulation, run_trial, Codeword, CorrelationMatrix,
    SimulationPlan, SimulationSummary, SpreadingMatrix, TiePolicy, TrialResult,
};
pub use theory::{
    capacity, g_gradient, g_value, solve_saddle, sweep, BetaGrid, CapacityCurve, CurvePoint, FixedPointMap,
    SaddleSolution, SolverConfig, Spacing,
};
