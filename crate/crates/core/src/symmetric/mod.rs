//! Symmetric channels `W_g = U_g ρ U_g†` of finite groups, their induced
//! channels and closed-form commitment capacities.

mod channel;
mod group;
mod isotypic;
mod nr;
mod rep;

pub use channel::{induce, make_symmetric_channel, stabilizer, InducedChannel, SymmetricChannel};
pub use group::FiniteGroup;
pub use isotypic::{
    average_state_entropy, isotypic_decompose, symmetric_capacity, IsotypicComponent,
    IsotypicDecomposition, SymmetricCapacity,
};
pub use nr::{check_nr, NrReport, NR_THRESHOLD};
pub use rep::{ProjectiveRep, RepKind};

/// Trace-distance tolerance for deciding that two outputs coincide.
pub const STATE_EQUALITY_TOL: f64 = 1e-9;
