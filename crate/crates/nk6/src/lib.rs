//! Numerical toolkit for the nearly Kähler six-sphere.
//!
//! The sphere `S^6` sits inside the purely imaginary Cayley numbers and
//! carries the almost complex structure `J_p U = p × U` induced by the
//! seven-dimensional cross product. This crate implements that algebra
//! exactly, differentiates immersions into `S^6` with truncated Taylor
//! (jet) arithmetic, and uses the two to compute and verify the extrinsic
//! geometry of 2- and 3-dimensional submanifolds: second fundamental
//! form, curvature tensors, covariant derivatives of `h`, warped product
//! structure, and Chen's delta invariant.
//!
//! Everything is pure and value-semantic; no operation mutates shared
//! state, so all entry points are safe to call from multiple threads.

pub mod cayley;
pub mod constructions;
mod error;
pub mod intrinsic;
pub mod invariants;
pub mod jets;
pub mod nearly_kahler;
pub mod submanifold;
pub mod suite;
pub mod tol;
pub mod warped;

pub use error::{Error, Result};
