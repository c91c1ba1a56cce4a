//! Numerical lab for radial Schrödinger operators `H = -Δ + V(|x|)` with
//! inverse-square potentials: positive harmonic functions, criticality, heat
//! kernels by mode decomposition, and two-sided Gaussian envelopes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod criticality;
pub mod error;
pub mod grid;
pub mod harmonic;
pub mod heatkernel;
pub mod potential;
pub mod quad;
pub mod report;
pub mod special;
pub mod weights;

pub use error::{Error, ErrorKind};
pub use grid::RadialGrid;
pub use potential::{exponents, Bump, Exponents, PotentialSpec, Profile};
