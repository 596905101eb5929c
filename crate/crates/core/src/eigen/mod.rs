//! Real symmetric eigensolvers.
//!
//! [`tridiag`] handles the ladder Hamiltonian at any size: Sturm-sequence
//! bisection for selected eigenvalues, inverse iteration for vectors.
//! [`dense`] is a cyclic Jacobi solver for the small full two-species model.

pub mod dense;
pub mod tridiag;

pub use dense::{eig_dense_sym, DenseSym, Spectrum, DENSE_DIM_LIMIT};
pub use tridiag::{eigenpairs_tridiag, eigenvalues_tridiag, eigenvector_tridiag, sturm_count, Selection};
