//! Two-qubit dephasing dynamics with entanglement and non-locality analysis.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod correlations;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod rng;
pub mod scenario;
pub mod state;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
