//! Atomistic energies, forces and stresses.
//!
//! Bump-bump interactions of separated atoms reduce to
//! `mu^2 e^{-(m/eps)|y_i - y_j|}`, so all energies and first derivatives are
//! evaluated as exponential pair sums. Pair sums stop once
//! `(m/eps)|y_i - y_j|` exceeds [`PAIR_CUTOFF`], below double precision
//! relative to the nearest-neighbour terms.

pub mod dirichlet;
pub mod periodic;
pub mod stress;

pub use dirichlet::{
    d_energy_dirichlet_a, d_energy_dirichlet_g, d_energy_dirichlet_y, energy_dirichlet,
    energy_dirichlet_fem, g_star, gamma_pair, mirror_energy, DirichletChain, GammaPair,
};
pub use periodic::{
    energy_from_field, energy_periodic, energy_periodic_fem, forces_from_field, forces_periodic,
    forces_periodic_fem,
};
pub use stress::{integrate_stress, weak_form_periodic, StressFunction};

/// Exponent beyond which pair terms are dropped.
pub const PAIR_CUTOFF: f64 = 60.0;
