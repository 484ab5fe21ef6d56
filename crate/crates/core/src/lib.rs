//! Numerical laboratory for two-dimensional magnetic Schrödinger operators
//! `H(A) = (p - A)^2 + V` whose magnetic field is a strong constant field
//! plus a multiscale random perturbation.
//!
//! The crate is organised bottom-up:
//!
//! - [`field_model`]: configuration, validation, seeded sampling and
//!   evaluation of `B_ω = B_det + μ B_ran^ω` and the potential `V`.
//! - [`gauge`]: vector potentials (symmetric, line-integral, box-subordinate)
//!   and Peierls link phases.
//! - [`landau_resolvent`]: complex Gamma, Tricomi `U(a, 1; ζ)` and the exact
//!   resolvent kernel of the constant-field Landau Hamiltonian.
//! - [`band_structure`]: classical band edges, extremal edges, fluctuation
//!   constants, forbidden intervals and localization windows.
//! - [`lattice`]: finite-volume Dirichlet Hamiltonians on a grid, banded
//!   `LDL^H` factorizations, dense and windowed eigensolvers, resolvents.
//! - [`diagnostics`]: Monte Carlo and deterministic measurements built on
//!   top of the lattice operators.

pub mod band_structure;
pub mod diagnostics;
pub mod error;
pub mod field_model;
pub mod gauge;
pub mod geometry;
pub mod landau_resolvent;
pub mod lattice;
pub mod quadrature;

pub use error::{Error, Result};
pub use geometry::{Point, Rect};

pub use num_complex::Complex64;
