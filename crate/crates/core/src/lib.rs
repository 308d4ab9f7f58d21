//! Bernstein-Markov factors `‖P'‖ / ‖P‖` of random polynomials.
//!
//! The crate samples polynomials `P_n(z) = Σ A_k z^k` with i.i.d. coefficients,
//! computes their norms on circles `|z| = r` (exact `L²`, quadrature `Lᵖ`,
//! certified sup-norm enclosures) and runs Monte-Carlo experiments that
//! compare the factors with their known limits and bounds.
//!
//! Start with the runnable programs in `examples/`, e.g.
//! `cargo run --release --example l2_trajectory`.

pub mod ensembles;
pub mod experiments;
pub mod error;
pub mod factor;
pub mod norms;
pub mod poly;
pub mod report;
pub mod selftest;
pub mod stats;

pub use ensembles::{sample_coefficients, sample_trajectory, CoefficientTrajectory, DistributionKind, DistributionSpec};
pub use error::{Error, Result};
pub use factor::{factor, l2_factor_trajectory, reciprocal_pair_check, self_reciprocal_factor_check, FactorSample};
pub use norms::{l2_norm, lp_norm, sup_norm, NormSpec, SupNormEnclosure};
pub use poly::{conjugate_reciprocal, derivative, dilate, evaluate, evaluate_on_grid, CircleGrid, Polynomial};
pub use stats::{monte_carlo_expectation, EstimateResult, Executor, TrialPlan};
