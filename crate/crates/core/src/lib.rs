//! Numerical workbench for the SU(2)-invariant spin-s Heisenberg chain with
//! generic non-diagonal open boundaries.
//!
//! The crate builds the fused R- and K-matrices, the one- and double-row
//! monodromy matrices and the fused transfer matrices, checks the operator
//! identities they satisfy, and constructs the separation-of-variables basis
//! and the Bethe states from numerically extracted Q-functions.
//!
//! Every operator is a dense [`CMatrix`]. Tensor products are ordered with the
//! auxiliary space first, followed by sites `1..=N`; within a spin-s space the
//! basis is `|s>, |s-1>, ..., |-s>`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bethe;
pub mod boundary;
pub mod error;
pub mod gauge;
pub mod linalg;
pub mod rmatrix;
pub mod sampling;
pub mod sov;
pub mod spectrum;
pub mod spin;
pub mod tq;
pub mod transfer;

pub use error::{Result, WorkbenchError};
pub use linalg::{c64, CMatrix, CVector, Polynomial};
pub use spin::SpinLabel;
pub use boundary::BoundaryParams;
pub use transfer::{Chain, ModelParams};
