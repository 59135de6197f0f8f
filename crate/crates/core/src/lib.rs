//! Variable-interaction detection and decomposition for large-scale
//! black-box optimization.
//!
//! The main entry point is [`grouping::svg_decompose`], which locates each
//! variable's optimum with a polynomial surrogate ([`surrogate`]) and groups
//! variables by whether perturbing them moves that optimum ([`detection`]).
//! [`baselines`] holds additive-difference decomposers for comparison,
//! [`cc`] a cooperative-coevolution optimizer consuming a decomposition and
//! [`metrics`] the accuracy scores.

// `!(x > 0.0)` is how NaN gets rejected along with the nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod baselines;
pub mod cc;
pub mod detection;
pub mod error;
pub mod exec;
pub mod grouping;
pub mod metrics;
pub mod problems;
pub mod surrogate;

pub use error::{Error, Result};
pub use exec::Execution;
