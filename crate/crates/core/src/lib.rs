//! Explicit exponential convergence rates for ruin probabilities of
//! level-dependent Lévy-driven risk processes.
//!
//! The surplus of an insurer evolves as
//! `dX = p(X) dt + σ(X) dW − dL` with `L` a pure-jump subordinator. Its
//! Siegmund dual is a jump-diffusion reflected at zero, and an exponential
//! Lyapunov function `V_λ(y) = e^{λy}` for that dual yields the bound
//!
//! ```text
//! 0 ≤ ψ(u) − ψ(u, T) ≤ [1 + (π, V_λ)] e^{−kT},   k = Φ(λ) > 0,
//! ```
//!
//! where `Φ(λ) = −sup_x φ(λ, x)` and `φ(λ, x) = p*(x)λ + σ²(x)λ²/2 + κ(λ)`.
//!
//! The crate is `no_std` (it needs `alloc`). Parallel execution, IO and file
//! formats live in the companion `ruinrate` crate; estimators here are generic
//! over a [`PathRunner`] so either side can drive them.

#![no_std]
// `!(x > 0.0)` rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod estimate;
pub mod levy;
pub mod quadrature;
pub mod rate;
pub mod risk;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
pub use estimate::{
    dual_tail_prob, dual_tail_probs, duality_check, ruin_prob_finite, ruin_prob_finite_grid,
    stationary_exp_moment, ultimate_ruin_prob, ultimate_ruin_probs, verify_bound, BoundOptions, BoundReport,
    BoundRow, DecayFit, DualityReport, DualityRow, McEstimate, PathRunner, Sequential,
    SIGMA_SLACK, STATIONARY_REPLICATES,
};
pub use levy::{ClaimDistribution, JumpModel, LevyDensity, Order, TruncatedLaw};
pub use rate::{solve_rate, stationarity_residual, truncation_sweep, RateResult, SweepPoint};
pub use risk::{PremiumRule, RiskModel, VolatilityRule};
pub use rng::RandomStream;
pub use sim::{
    contraction_horizon, contraction_horizon_from, simulate_coupled, simulate_dual, simulate_free_surplus,
    simulate_surplus, skorohod_map, PathSample, SimConfig,
};
