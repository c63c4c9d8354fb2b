use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Relative tolerance on `‖H − H*‖_max` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const EIGEN_EPS: f64 = f64::EPSILON;
const EIGEN_MAX_ITER: usize = 0; // 0 = iterate until convergence

/// Eigenvalues `λ_1 ≥ … ≥ λ_d` of a Hermitian matrix with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`.
    pub frame: ComplexMatrix,
}

impl HermitianSpectrum {
    /// Sum of the `k` largest eigenvalues.
    pub fn top_sum(&self, k: usize) -> f64 {
        self.eigenvalues[..k].iter().sum()
    }

    /// Sum of the `k` smallest eigenvalues.
    pub fn bottom_sum(&self, k: usize) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - k..].iter().sum()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diag_real(&self.eigenvalues);
        d.conjugate_by(&self.frame)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL * (1.0 + h.max_abs()) {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (‖H − H*‖_max = {defect:e})"
        )));
    }
    Ok(())
}

/// Symmetrizes before handing the lower triangle to the solver.
fn symmetrized(h: &ComplexMatrix) -> DMatrix<Complex64> {
    h.hermitian_part().into_dmatrix()
}

/// Full eigendecomposition of a Hermitian matrix, eigenvalues descending.
///
/// Equal eigenvalues keep the solver's relative order (stable sort).
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianSpectrum> {
    check_hermitian(h)?;
    let eig = SymmetricEigen::try_new(symmetrized(h), EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Numeric("Hermitian eigensolver did not converge".into()))?;
    let d = h.dim();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let frame = ComplexMatrix::from_fn(d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianSpectrum { eigenvalues, frame })
}

/// Eigenvalues only, descending. Cheaper than [`eig_hermitian`].
pub fn eigenvalues_hermitian(h: &ComplexMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    Ok(sorted_eigenvalues(symmetrized(h)))
}

/// Eigenvalues of an already exactly-Hermitian matrix, skipping validation.
pub(crate) fn sorted_eigenvalues(h: DMatrix<Complex64>) -> Vec<f64> {
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}
