//! Spectral subspace perturbation for finite Hermitian matrices.
//!
//! Given a Hermitian `A` whose spectrum splits as `sigma ∪ Sigma` with gap
//! `d`, and a Hermitian perturbation `V = V+ - V-`, this crate computes the
//! spectral projectors `E_A(sigma)` and `E_{A+V}(omega)`, the angles between
//! their ranges, and every closed-form bound on those angles in terms of
//! `|V+| + |V-|` and `d`. The [`harness`] module checks the bounds on
//! concrete and randomly generated instances.

// NaN must fail every precondition, hence `!(a < b)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod spectrum;

pub use error::{Error, Result};
pub use linalg::{
    eigh, operator_norm, sign_split, spectral_projector, CMatrix, HermitianMatrix,
    PerturbationSplit, Projector, SpectralDecomposition,
};
pub use spectrum::{Interval, PerturbedSeparation, SpectralPartition};
