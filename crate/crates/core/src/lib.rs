//! Truncated-Fock, Gaussian and phase-space tools for bosonic noise channels,
//! with numerical checks of trace-distance bounds.
// `!(x >= 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channels;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod linalg;
pub mod phase_space;
pub mod power;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
