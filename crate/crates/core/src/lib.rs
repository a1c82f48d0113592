//! Spectral-gap estimation for non-Hermitian matrices built on a single
//! primitive: fuzzy detection of whether some eigenvalue lies near a given
//! point of the complex plane.
//!
//! The crate is `no_std` (with `alloc`). Everything that touches files,
//! threads or the command line lives in the `nhgap` crate.

#![no_std]
#![warn(missing_debug_implementations, rust_2018_idioms)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;

pub mod bqp;
pub mod covering;
pub mod filter;
pub mod fqed;
pub mod instances;
pub mod linalg;
pub mod lindblad;
pub mod oracle;
pub mod search;

pub use error::{Error, Result};
pub use fqed::{Backend, Detector, FqedConfig, FqedOutcome, Noise, SerialDetector, StateSource};
pub use linalg::{CMatrix, SpectralOperand, C64};
