//! Inclusion sets and finite-arithmetic approximations for spectra and pseudospectra of
//! tridiagonal (and blocked banded) bi-infinite matrices.
//!
//! The building blocks are lower norms of finite sections, decided through LDL^H
//! definiteness tests. See [`inclusion`] for membership sweeps and [`oracle`] for the
//! closed-form and symbol-based reference spectra.

pub mod exec;
pub mod inclusion;
pub mod linalg;
pub mod operator;
pub mod oracle;
pub mod penalty;

pub use linalg::{CMatrix, C64};
