//! Ordered ℓ₂ regularized regression solved with over-relaxed ADMM.
//!
//! The crate provides the ordered ℓ₂ penalty and its shrinkage operators,
//! BHq-style regularizing sequences, the ADMM engine for ordered ridge
//! regression, the ordered elastic net and a lasso baseline, and the data
//! plumbing (synthetic generation, LIBSVM loading, splitting, evaluation)
//! needed to run experiments end to end.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod export;
pub mod lambda_seq;
pub mod linalg;
pub mod penalty;
pub mod solver;

pub use error::{Error, Result};
pub use lambda_seq::{BhqConfig, SampleMode};
pub use linalg::{DenseMatrix, DenseVector};
pub use penalty::RegularizationSequence;
pub use solver::{FitResult, Penalty, SolverConfig, TraceRecord};
