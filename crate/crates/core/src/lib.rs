//! Frequency- and time-domain models of a two-mode rotation sensor whose
//! cavities couple to a shared waveguide at several distant points.
//!
//! The crate is `no_std` with `alloc`. File formats, configuration and the
//! command-line driver live in the `giantgyro` companion crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
mod error;
pub mod linear_response;
mod matrix;
mod poly;
mod roots;
pub mod sensing;
pub mod topology;

pub use error::{Error, Result};
pub use linear_response::{Structure, SystemParams};
pub use matrix::{Mat2, Mat2x5};
pub use topology::{Orientation, Topology, TopologyKind};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
