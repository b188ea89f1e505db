//! Commitment capacity, code construction and security auditing for
//! classical-quantum channels.
//!
//! Logarithms are base 2 throughout: every entropy, divergence and rate is in
//! bits.

pub mod codes;
pub mod error;
pub mod info;
pub mod io;
pub mod lp;
pub mod protocol;
pub mod quantum;
pub mod runner;
pub mod scalar;
pub mod separators;
pub mod symmetric;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision state.
pub type Density = quantum::DensityMatrix<f64>;
/// Double-precision Hermitian operator.
pub type Hermitian = quantum::HermitianOperator<f64>;
/// Double-precision channel.
pub type Channel = quantum::CqChannel<f64>;
/// Double-precision distribution.
pub type Dist = quantum::Distribution<f64>;
/// Single-precision state.
pub type Density32 = quantum::DensityMatrix<f32>;
/// Single-precision channel.
pub type Channel32 = quantum::CqChannel<f32>;
