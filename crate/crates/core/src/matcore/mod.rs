//! Dense complex matrices, tensor products, transposition variants,
//! Hermitian eigendecomposition and seeded random test matrices.

mod eigen;
mod matrix;
pub mod random;
mod shape;

pub use eigen::{eig_hermitian, eigenvalues_hermitian, HermitianSpectrum, HERMITIAN_TOL};
pub(crate) use eigen::sorted_eigenvalues;
pub use matrix::{is_orthogonal_pair, ComplexMatrix, Side};
pub use shape::BipartiteShape;
