//! Penalized shallow-network regression.
//!
//! The crate covers the full pipeline for studying how the mean integrated
//! squared error (MISE) of a regularized two-layer network behaves as the
//! number of hidden neurons grows:
//!
//! - [`data`]: seeded synthetic populations (sphere/ball covariates, the
//!   zero model, the radial-plus-cosine benchmark model).
//! - [`net`]: the network `x -> sum_j a_j sigma(theta_j^T x + b_j)`, its penalty
//!   functionals, truncation and an exact 1-D ReLU interpolant.
//! - [`fit`]: the ridge core, alternating ridge regression for ReLU/L2,
//!   a lasso/gradient block scheme for Sigmoid/L1 and the penalty schedules.
//! - [`complexity`]: Monte-Carlo Rademacher/Gaussian complexity of
//!   penalty-constrained classes.
//! - [`theory`]: closed-form bound curves, shape classification and
//!   breakpoints.
//! - [`metrics`]: empirical and Monte-Carlo prediction errors, replication
//!   aggregates.
//!
//! All randomness flows through [`rng::stream`], so every output is a pure
//! function of its arguments and seed.

pub mod complexity;
pub mod data;
pub mod error;
pub mod fit;
pub mod metrics;
pub mod net;
pub mod rng;
pub mod theory;

pub use complexity::{complexity_estimate, ComplexityClass, ComplexityEstimate, Multiplier, SearchConfig};
pub use data::{gen_fig2, gen_zero_model, sample_ball, sample_sphere, Dataset, ModelId};
pub use error::{Error, Result};
pub use fit::{
    fit_alternating_ridge, fit_sigmoid_l1, lambda_schedule, ridge_solve, FitConfig, FitResult, Regime,
};
pub use metrics::{aggregate, empirical_error, prediction_error_mc, Aggregate, ErrorReport};
pub use net::{build_relu_interpolant_1d, eval_network, truncate, Activation, PenaltyKind, PenaltySpec, ShallowNet};
pub use theory::{breakpoints, classify_shape, mise_bound, minimax_reference, BoundCurve, Shape};
