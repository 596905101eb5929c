//! Numerical laboratory for an exactly solvable avalanche-detector boson model.
//!
//! Two boson species share a fixed particle number `N`: "stuff" bosons `A` and
//! detected bosons `B`. The reduced single-species Hamiltonian is tridiagonal on
//! the Fock ladder `|s> ∝ (a†)^(N-s) (b†)^s |0>`, `s = 1..N`, which makes large-`N`
//! exact diagonalization cheap. Around that core the crate provides:
//!
//! - [`model`]: parameters, the reduced ladder Hamiltonian and the full
//!   two-species Hamiltonian used as a small-`N` oracle.
//! - [`eigen`]: Sturm bisection with inverse iteration for tridiagonal matrices
//!   and a cyclic Jacobi solver for dense symmetric matrices.
//! - [`wkb`]: the continuum potential, turning points, phase integral and
//!   semiclassical level solver.
//! - [`analysis`]: ground-state geometry, gap, coherent-state ansatz, fixed-`N`
//!   projections and edge scaling.
//! - [`dynamics`]: the classical avalanche equation of motion.
//!
//! Units: `ħ = 1`; energies are in the units of the input `Ω` and `Λ`.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
pub mod eigen;
mod error;
pub mod model;
pub mod wkb;

pub use error::{Error, Result};
