//! Seeded generators for test matrices.
//!
//! All samplers draw from a caller-owned RNG; [`seeded_rng`] gives the
//! ChaCha-based generator used throughout so that a seed pins every result.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::ComplexMatrix;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// `(G + G*)/2` for a Ginibre `G`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    random_complex(dim, rng).hermitian_part()
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` folded back into `Q`.
pub fn random_haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(dim, rng).into_dmatrix();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_dmatrix(q).expect("QR of a square matrix is square")
}

/// First `k` columns of a Haar unitary, returned as the `dim × k` column list.
pub fn random_isometry<R: Rng + ?Sized>(dim: usize, k: usize, rng: &mut R) -> Vec<Vec<Complex64>> {
    let u = random_haar_unitary(dim, rng);
    (0..k).map(|j| (0..dim).map(|i| u[(i, j)]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_is_unitary() {
        let mut rng = seeded_rng(1);
        for dim in [1, 2, 4, 9, 12] {
            let u = random_haar_unitary(dim, &mut rng);
            assert!(u.is_unitary(1e-12), "dim {dim}");
        }
    }

    #[test]
    fn hermitian_is_exact() {
        let mut rng = seeded_rng(9);
        let h = random_hermitian(5, &mut rng);
        assert_eq!(h.hermitian_defect(), 0.0);
    }

    #[test]
    fn same_seed_same_bits() {
        let a = random_haar_unitary(4, &mut seeded_rng(77));
        let b = random_haar_unitary(4, &mut seeded_rng(77));
        assert_eq!(a, b);
        let c = random_complex(4, &mut seeded_rng(78));
        assert_ne!(a, c);
    }

    #[test]
    fn haar_first_moment_vanishes() {
        // E[U_00] = 0 and E[|U_00|²] = 1/d for Haar U.
        let mut rng = seeded_rng(3);
        let (d, trials) = (3, 4000);
        let mut mean = Complex64::new(0.0, 0.0);
        let mut second = 0.0;
        for _ in 0..trials {
            let u = random_haar_unitary(d, &mut rng);
            mean += u[(0, 0)];
            second += u[(0, 0)].norm_sqr();
        }
        mean /= trials as f64;
        second /= trials as f64;
        assert!(mean.norm() < 0.05, "mean {mean}");
        assert!((second - 1.0 / d as f64).abs() < 0.02, "second moment {second}");
    }
}
