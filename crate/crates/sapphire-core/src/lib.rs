//! Solvers for regularized empirical risk minimization
//!
//! ```text
//!     minimize  (1/n) sum_i l(a_i' w) + (nu/2) ||w||^2 + r(w)
//! ```
//!
//! where the smooth part is a generalized linear model loss and `r` is a
//! possibly non-smooth, possibly non-convex regularizer (L1, SCAD, MCP).
//!
//! The main solver is SAPPHIRE, a preconditioned variance-reduced stochastic
//! gradient method: gradients are variance-reduced SVRG-style estimators, the
//! metric is a lazily updated sketch-based preconditioner (subsampled Newton
//! or Nystrom subsampled Newton), and each step evaluates a scaled proximal
//! mapping by accelerated proximal gradient. ProxSVRG and SAGA baselines share
//! the same trace schema for benchmarking.

pub mod data;
pub mod linalg;
pub mod losses;
pub mod oracle;
pub mod precond;
pub mod prox_solver;
pub mod regularizers;
pub mod solver;

pub use data::Dataset;
pub use linalg::{DenseMatrix, SparseRowMatrix};
pub use losses::GlmLoss;
pub use precond::Preconditioner;
pub use regularizers::Regularizer;
pub use solver::{SolverConfig, SolverResult, TraceRecord};
