//! Two-dimensional Ising model on the torus under Metropolis dynamics.
//!
//! Configurations are bit-packed into a `u64` (see [`lattice`]), so
//! `K·L ≤ 64`. Structures for the saddle landscape need `K < L`.

pub mod barrier;
pub mod canonical;
pub mod exact;
pub mod lattice;
pub mod structure;
pub mod test_objects;
pub mod thermo;

pub use barrier::{communication_height, communication_height_exhaustive, reachable};
pub use canonical::{canonical_configurations, canonical_path};
pub use exact::{exact_small_lattice, SmallLatticeReport};
pub use lattice::{Lattice, SpinConfig};
pub use structure::{typical_structure, IsingModel, TypicalStructure};
pub use test_objects::{f0_value, scaled_limits, test_flow_psi0};
pub use thermo::{density_of_states, metropolis_rate, Gibbs};
