//! Field-based atomistic chain in one dimension, its Cauchy-Born continuum
//! limit, and two atomistic-to-continuum couplings.
//!
//! Atoms carry a compactly supported bump density; the interaction field
//! solves `-eps^2 phi'' + m^2 phi = rho` and the energy is `1/2 int rho phi`.

pub mod ac;
pub mod cauchy_born;
pub mod density;
pub mod energy;
pub mod error;
pub mod field;
pub mod harness;
pub mod lattice;
pub mod minimize;
pub mod model;
pub mod quad;

pub use density::{BumpProfile, BumpShape, Params};
pub use error::{Error, Result};
pub use lattice::ChainConfig;
