//! Functional intrinsic volumes of super-coercive convex functions.
//!
//! The crate evaluates the valuations `Z_{j,ζ}(u) = ∫ ζ(|∇u|) [D²u]_{n-j} dx`
//! through several independent routes (direct quadrature, Cauchy–Kubota
//! averages over Grassmannians, dual integrals) and checks the identities
//! that relate them.

// `!(x < y)` is used deliberately so that NaN takes the failure branch.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod numerics;
pub mod subspaces;
pub mod convex;
pub mod weights;
pub mod valuations;
pub mod verify;

pub use error::{Error, Result};
