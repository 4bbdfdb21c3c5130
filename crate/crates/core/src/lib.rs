//! Tikhonov regularization of linear ill-posed problems in sequence spaces with
//! sparsity-promoting `ℓp` penalties, `0 ≤ p ≤ τ`.
//!
//! The crate is a numerical laboratory: sequences are finitely truncated, the
//! forward map is a diagonal operator realizing a two-sided stability estimate
//! against `ℓa`, and with misfit exponent `σ = a` the Tikhonov functional is
//! separable, so its global minimizer (including the combinatorial `ℓ0` case
//! and the nonconvex `0 < p < 1` case) is computed exactly coordinate by
//! coordinate. On top of that sit hard thresholding, the a priori parameter
//! choice, the predicted rate exponents and a δ-sweep harness that fits
//! empirical log-log slopes.

pub mod error;
pub mod experiments;
pub mod model;
pub mod oracle;
pub mod params;
pub mod rng;
pub mod sequences;
pub mod thresholding;
pub mod tikhonov;

pub use error::{Error, Result};
pub use model::{gen_noise, gen_truth, DiagonalOperator, ProblemRecord, RegProblem, TruthKind};
pub use params::SpaceParams;
pub use sequences::{norm_s, penalty_rp, InequalityCheck, TruncatedSequence, INEQUALITY_SLACK};
pub use thresholding::{hard_threshold, ThresholdRule};
pub use tikhonov::{RegConfig, RegSolution, SolverSettings};
