//! k-numerical ranges of complex matrices and the linear maps on
//! `M_m ⊗ M_n` that preserve them on tensor products.
//!
//! * [`matcore`]: dense complex matrices, Kronecker products, partial transposes,
//!   Hermitian eigendecomposition and seeded random matrices.
//! * [`krange`]: `W_k(A)` as an exact interval (Hermitian input) or a sampled
//!   support profile with boundary points (general input).
//! * [`maps`]: explicit matrices of linear maps on `M_mn`, the canonical
//!   preserver forms and Choi matrices.
//! * [`classify`]: randomized verification of the preserving property and
//!   recovery of the canonical form of a preserver.
//! * [`papersuite`]: the explicit counterexample, implication checks on
//!   constructed instances and an end-to-end suite over a shape.
//! * [`io`]: JSON, CSV and SVG file formats.

pub mod classify;
pub mod error;
pub mod io;
pub mod krange;
pub mod maps;
pub mod matcore;
pub mod papersuite;

pub use error::{Error, Result};
pub use matcore::{BipartiteShape, ComplexMatrix, Side};
