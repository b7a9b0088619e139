//! Iterative regularization for (kernel) least squares.
//!
//! Gradient descent, the nu-method (heavy-ball with varying parameters) and
//! Nesterov acceleration all regularize least squares implicitly: the
//! iteration count plays the role of the regularization parameter. This
//! crate implements the three iterations together with the spectral-filter
//! view that explains them, and the experiments that expose the resulting
//! bias-variance tradeoff:
//!
//! - [`filters`]: the filter polynomials `g_t` and residuals `r_t` of each
//!   method via their exact recursions, qualification measurements, the
//!   Nesterov auxiliary sequence, and the Jacobi-weight orthogonality of the
//!   nu-method residuals;
//! - [`verify`]: a numerical check of every uniform bound the filters
//!   satisfy, on dense spectral grids;
//! - [`spectral`]: a symmetric eigensolver, matrix functions, and the
//!   effective dimension;
//! - [`kernels`]: Gram-matrix assembly for linear, Gaussian and polynomial
//!   kernels;
//! - [`solvers`]: the iterations in coefficient space against a normalized
//!   Gram operator, checked against the closed-form spectral solution;
//! - [`synthetic`]: generators with controlled spectrum decay and source
//!   smoothness, excess risk, and infinite-sample bias curves;
//! - [`experiments`]: the seeded repetition harness producing mean/variance
//!   error curves, stopping rules, and rate-exponent fits;
//! - [`cli`]: the `verify` / `filters` / `simulate` / `fit` subcommands with
//!   reproducible CSV output.
//!
//! The `examples/` directory has one runnable example per capability; start
//! with `verify_bounds` and `simulate_bias_variance`.

// Validation guards are written as `!(x > 0.0)` on purpose: the negation
// rejects NaN along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod experiments;
pub mod filters;
pub mod kernels;
pub mod solvers;
pub mod spectral;
pub mod synthetic;
pub mod verify;

mod fitting;
mod quad;

pub use error::{Error, Result};
pub use filters::{FilterMethod, FilterTrace, MethodKind};
pub use spectral::EigenDecomposition;
