//! Polar code construction, encoding, successive-cancellation decoding and
//! BI-AWGN Monte-Carlo simulation.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod code;
pub mod construct;
pub mod encoder;
pub mod error;
pub mod index;
pub mod scd;
pub mod seed;
pub mod sim;

pub use error::{Error, Result};
