//! Dense Hermitian linear algebra, density operators and classical-quantum
//! channels.
//!
//! All logarithms in this crate are base 2, so every entropy and rate is
//! reported in bits.

mod channel;
mod density;
mod distribution;
mod hermitian;
mod joint;
mod ops;
pub mod random;

pub use channel::CqChannel;
pub use density::DensityMatrix;
pub use distribution::Distribution;
pub use hermitian::{HermitianOperator, Spectrum};
pub(crate) use hermitian::{
    hermitian_basis, symmetrize, trace_product_re as hermitian_trace_product,
};
pub use joint::{joint_state, JointCqState};
pub use ops::{
    kron_all, matrix_power, partial_trace_first, partial_trace_second, tensor_power_state,
    trace_distance, trace_norm, von_neumann_entropy, Budget,
};

use nalgebra::DMatrix;

use crate::scalar::C;

/// Dense complex matrix over `T`.
pub type CMatrix<T> = DMatrix<C<T>>;

/// Maximum absolute deviation from conjugate symmetry tolerated on input.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace and positivity tolerance for density operators.
pub const DENSITY_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
