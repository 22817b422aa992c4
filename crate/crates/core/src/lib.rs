//! Poisson–Nijenhuis structures on the Grassmannian coadjoint orbits of `U(n)`.
//!
//! The crate is `no_std` (it needs `alloc`). It builds the KKS form and the
//! Bruhat–Poisson tensor on `Gr(k, n)` in affine charts, evaluates the PN
//! hierarchy and its identities with finite differences, compares Nijenhuis
//! eigenvalues against Gelfand–Tsetlin variables, and models the eigenvalue
//! groupoid over the Gelfand–Tsetlin polytope.
//!
//! Module map:
//! - [`geometry`]: charts, embedding, tangent frames, finite differences.
//! - [`pn`]: pointwise tensor calculus (Schouten, Koszul, torsion, hierarchy).
//! - [`models`]: KKS form, Bruhat–Poisson tensor, pencil, GT spectra, calibration.
//! - [`groupoid`]: the groupoid over the GT polytope, its action and cocycles.
#![cfg_attr(not(test), no_std)]
// `!(x < y)` is used on purpose so that NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod geometry;
pub mod groupoid;
pub mod linalg;
pub mod models;
pub mod pn;

pub use error::{Error, Result};
