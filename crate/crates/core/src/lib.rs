//! Explicit nonlinear approximation of mixed-smoothness functions on the
//! unit cube.
//!
//! The pipeline goes from tensorized Faber coefficients and sparse-grid
//! truncation ([`tensor`]) through quantized coverings of the Hölder unit
//! ball ([`covering`]) to a parametric-manifold encoder/decoder
//! ([`codec`]) with explicit error bounds and parameter budgets.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod codec;
pub mod combinatorics;
pub mod corpus;
pub mod covering;
pub mod error;
pub mod exec;
pub mod format;
pub mod harness;
pub mod oracle;
pub mod tensor;
pub mod univariate;

pub use error::{Error, Result};
pub use exec::Exec;
pub use oracle::{FnOracle, MemoOracle, Oracle};
