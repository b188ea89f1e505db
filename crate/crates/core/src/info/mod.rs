//! Entropic and Rényi quantities of classical-quantum states and the
//! commitment-capacity optimizer.

mod capacity;
mod entropy;
mod renyi;

pub use capacity::{
    capacity, capacity_with, conditional_entropy_gradient, CapacityOptions, CapacityResult,
};
pub use entropy::{conditional_entropy, holevo_info, relative_entropy};
pub use renyi::{
    min_sigma_conditional, minimize_weighted_quasi, quasi_entropy, sandwiched_divergence,
    sandwiched_mutual_info, sandwiched_mutual_info_solution, RenyiOrder, SigmaSolution,
    SolverOptions, StateFactor,
};
