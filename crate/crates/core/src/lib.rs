//! Explicit constants for the multivariate Berry–Esseen theorem.
//!
//! The crate evaluates the computable upper bounds on the maximal Gaussian
//! perimeter of convex sets, assembles the bootstrap inequalities that turn a
//! perimeter bound into a central-limit constant, and provides the geometric
//! and Stein-method machinery needed to check those inequalities numerically
//! at small scale.
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI and
//! multi-threaded drivers live in the companion `clt-bounds` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod audit;
pub mod constants;
mod error;
pub mod geometry;
pub mod montecarlo;
pub mod optimize;
pub mod perimeter;
pub mod quadrature;
pub mod specialfns;
pub mod stein;

pub use error::{Error, Result};
