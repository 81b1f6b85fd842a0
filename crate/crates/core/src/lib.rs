//! Commutation structure of Pauli and Majorana operator families.
//!
//! The crate computes Lovász theta values of commutation graphs (exactly for
//! the Majorana/Johnson-scheme case, numerically for arbitrary small graphs),
//! bounds on the commutation index, dense SYK / spin-glass / classical p-spin
//! Hamiltonians, and disorder Monte Carlo experiments checking concentration
//! and free-energy bounds driven by the commutation index.
//!
//! Module map:
//! - [`algebra`]: Pauli strings, Majorana monomials, operator sets.
//! - [`linalg`]: dense Hermitian eigensolver, matrix exponentials, seeded Gaussian streams.
//! - [`graph`]: commutation graphs and the commuting / anticommuting constructions.
//! - [`scheme`]: Johnson scheme and dual Hahn polynomials.
//! - [`theta`]: exact LP and numeric SDP for the Lovász theta function.
//! - [`index`]: bounds and heuristics for the commutation index.
//! - [`models`]: random Hamiltonian ensembles and bound calculators.
//! - [`lab`]: disorder experiments and their reports.

pub mod algebra;
pub mod error;
pub mod graph;
pub mod index;
pub mod lab;
pub mod linalg;
pub mod models;
pub mod scheme;
pub mod theta;

pub use error::{Error, Result};

/// Largest dense dimension accepted anywhere.
pub const MAX_DENSE_DIM: usize = 1 << 14;
/// Default working cap for dense dimension.
pub const SOFT_DENSE_DIM: usize = 1 << 12;
