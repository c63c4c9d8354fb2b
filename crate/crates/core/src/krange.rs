//! The k-numerical range `W_k(A) = { tr(X*AX)/k : X*X = I_k }`.
//!
//! For Hermitian `A` the range is the interval between the means of the `k`
//! smallest and `k` largest eigenvalues. For general `A` it is a compact
//! convex set, represented here by its support function
//! `h(θ) = max Re(e^{−iθ} W_k(A))`, which equals the mean of the `k` largest
//! eigenvalues of the Hermitian part of `e^{−iθ}A`, sampled on a uniform
//! angle grid together with one boundary point per angle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::random::{random_isometry, seeded_rng};
use crate::matcore::{eig_hermitian, eigenvalues_hermitian, sorted_eigenvalues, ComplexMatrix};

pub const DEFAULT_NUM_ANGLES: usize = 360;
pub const DEFAULT_TOL: f64 = 1e-8;
pub const MIN_NUM_ANGLES: usize = 8;

/// `W_k` of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KInterval {
    pub lo: f64,
    pub hi: f64,
}

impl KInterval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x >= self.lo - tol && x <= self.hi + tol
    }
}

/// Support function of `W_k(A)` and one boundary point per grid angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportProfile {
    pub k: usize,
    pub angles: Vec<f64>,
    pub support: Vec<f64>,
    pub boundary: Vec<Complex64>,
}

impl SupportProfile {
    pub fn num_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn max_abs_support(&self) -> f64 {
        self.support.iter().fold(0.0, |acc, h| acc.max(h.abs()))
    }

    /// Largest violation of the profile's own constraints: each boundary
    /// point must lie on its supporting line and inside every half-plane.
    pub fn consistency_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (j, b) in self.boundary.iter().enumerate() {
            worst = worst.max((rotated_re(*b, self.angles[j]) - self.support[j]).abs());
            for (l, &theta) in self.angles.iter().enumerate() {
                worst = worst.max(rotated_re(*b, theta) - self.support[l]);
            }
        }
        worst
    }
}

/// `Re(e^{−iθ} z)`.
pub fn rotated_re(z: Complex64, theta: f64) -> f64 {
    z.re * theta.cos() + z.im * theta.sin()
}

/// `θ_j = 2πj/N`.
pub fn angle_grid(num_angles: usize) -> Vec<f64> {
    (0..num_angles).map(|j| 2.0 * PI * j as f64 / num_angles as f64).collect()
}

fn check_k(dim: usize, k: usize) -> Result<()> {
    if k < 1 || k >= dim {
        return Err(Error::Domain(format!("k must lie in 1..={} for a {dim}x{dim} matrix, got {k}", dim - 1)));
    }
    Ok(())
}

fn check_angles(num_angles: usize) -> Result<()> {
    if num_angles < MIN_NUM_ANGLES {
        return Err(Error::Domain(format!("need at least {MIN_NUM_ANGLES} angles, got {num_angles}")));
    }
    Ok(())
}

/// Mean of the `k` largest and `k` smallest of descending `eigenvalues`.
fn interval_from_sorted(eigenvalues: &[f64], k: usize) -> KInterval {
    let d = eigenvalues.len();
    let kf = k as f64;
    KInterval {
        lo: eigenvalues[d - k..].iter().sum::<f64>() / kf,
        hi: eigenvalues[..k].iter().sum::<f64>() / kf,
    }
}

/// `W_k(H)` for Hermitian `H`, `1 ≤ k ≤ dim − 1`.
pub fn krange_hermitian(h: &ComplexMatrix, k: usize) -> Result<KInterval> {
    check_k(h.dim(), k)?;
    krange_hermitian_unchecked(h, k)
}

/// Same as [`krange_hermitian`] but also accepts `k = dim`, where the range
/// collapses to `{tr H / dim}`.
pub(crate) fn krange_hermitian_unchecked(h: &ComplexMatrix, k: usize) -> Result<KInterval> {
    if k < 1 || k > h.dim() {
        return Err(Error::Domain(format!("k = {k} out of range for dim {}", h.dim())));
    }
    let vals = eigenvalues_hermitian(h)?;
    Ok(interval_from_sorted(&vals, k))
}

/// Hermitian part of `e^{−iθ}A` from precomputed `H = Re A`, `K = Im A`:
/// `cos θ·H + sin θ·K`.
fn rotated_hermitian(h: &ComplexMatrix, skew: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    &h.scale_real(c) + &skew.scale_real(s)
}

/// `h(θ) = max Re(e^{−iθ} W_k(A))`.
pub fn support_value(a: &ComplexMatrix, k: usize, theta: f64) -> Result<f64> {
    check_k(a.dim(), k)?;
    let herm = rotated_hermitian(&a.hermitian_part(), &a.skew_hermitian_part(), theta);
    let vals = sorted_eigenvalues(herm.into_dmatrix());
    Ok(vals[..k].iter().sum::<f64>() / k as f64)
}

/// Boundary points at `θ` and `θ + π` from a single eigendecomposition of
/// the Hermitian part of `e^{−iθ}A`: the top-`k` eigenvectors expose the
/// point at `θ`, the bottom-`k` ones the point at `θ + π`.
fn boundary_pair(
    a: &ComplexMatrix,
    h: &ComplexMatrix,
    skew: &ComplexMatrix,
    k: usize,
    theta: f64,
) -> Result<((f64, Complex64), (f64, Complex64))> {
    let spec = eig_hermitian(&rotated_hermitian(h, skew, theta))?;
    let d = a.dim();
    let kf = k as f64;
    let compress = |cols: std::ops::Range<usize>| -> Complex64 {
        // tr(P A)/k with P the projector onto the chosen eigenvectors.
        let frame = spec.frame.as_dmatrix();
        let mut acc = Complex64::new(0.0, 0.0);
        for c in cols {
            let v = frame.column(c);
            let av = a.as_dmatrix() * v;
            acc += v.dotc(&av);
        }
        acc / kf
    };
    let top = (spec.top_sum(k) / kf, compress(0..k));
    let bottom = (-spec.bottom_sum(k) / kf, compress(d - k..d));
    Ok((top, bottom))
}

/// A point of `W_k(A)` on the supporting line at angle `θ`.
///
/// Ties among the top-`k` eigenvalues are broken by the stable eigenvalue
/// order; any choice inside the tie gives a valid boundary point.
pub fn boundary_point(a: &ComplexMatrix, k: usize, theta: f64) -> Result<Complex64> {
    check_k(a.dim(), k)?;
    let ((_, point), _) = boundary_pair(a, &a.hermitian_part(), &a.skew_hermitian_part(), k, theta)?;
    Ok(point)
}

/// Support values and boundary points on the `num_angles` uniform grid.
pub fn krange_profile(a: &ComplexMatrix, k: usize, num_angles: usize) -> Result<SupportProfile> {
    check_k(a.dim(), k)?;
    check_angles(num_angles)?;
    let angles = angle_grid(num_angles);
    let h = a.hermitian_part();
    let skew = a.skew_hermitian_part();
    let mut support = vec![0.0; num_angles];
    let mut boundary = vec![Complex64::new(0.0, 0.0); num_angles];
    let paired = if num_angles.is_multiple_of(2) { num_angles / 2 } else { num_angles };
    for j in 0..paired {
        let ((h_top, b_top), (h_bot, b_bot)) = boundary_pair(a, &h, &skew, k, angles[j])?;
        support[j] = h_top;
        boundary[j] = b_top;
        if paired < num_angles {
            support[j + paired] = h_bot;
            boundary[j + paired] = b_bot;
        }
    }
    Ok(SupportProfile { k, angles, support, boundary })
}

/// Support values only on the uniform grid; the fast path used by verification.
pub fn support_grid(a: &ComplexMatrix, k: usize, num_angles: usize) -> Result<Vec<f64>> {
    check_k(a.dim(), k)?;
    check_angles(num_angles)?;
    let angles = angle_grid(num_angles);
    let h = a.hermitian_part();
    let skew = a.skew_hermitian_part();
    let kf = k as f64;
    let mut support = vec![0.0; num_angles];
    let paired = if num_angles.is_multiple_of(2) { num_angles / 2 } else { num_angles };
    for j in 0..paired {
        let vals = sorted_eigenvalues(rotated_hermitian(&h, &skew, angles[j]).into_dmatrix());
        support[j] = vals[..k].iter().sum::<f64>() / kf;
        if paired < num_angles {
            support[j + paired] = -vals[vals.len() - k..].iter().sum::<f64>() / kf;
        }
    }
    Ok(support)
}

/// Relative discrepancy between two sampled support functions:
/// `max_j |h1_j − h2_j| / (1 + max(max|h1|, max|h2|))`.
pub fn support_defect(h1: &[f64], h2: &[f64]) -> Result<f64> {
    if h1.len() != h2.len() {
        return Err(Error::Domain(format!(
            "support grids differ in length ({} vs {})",
            h1.len(),
            h2.len()
        )));
    }
    let scale = h1.iter().chain(h2).fold(0.0_f64, |acc, h| acc.max(h.abs()));
    let diff = h1.iter().zip(h2).fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
    Ok(diff / (1.0 + scale))
}

/// Decides `W_k` equality by comparing support functions on the shared grid.
pub fn ranges_equal(p1: &SupportProfile, p2: &SupportProfile, tol: f64) -> Result<bool> {
    if p1.k != p2.k || p1.num_angles() != p2.num_angles() {
        return Err(Error::Domain(format!(
            "profiles are not comparable: k {} vs {}, {} vs {} angles",
            p1.k,
            p2.k,
            p1.num_angles(),
            p2.num_angles()
        )));
    }
    Ok(support_defect(&p1.support, &p2.support)? <= tol)
}

/// `w_k(A) = max |W_k(A)|`, approximated by the largest grid support value.
///
/// This is a lower bound within `O(‖A‖/N²)` of the true radius for `N` angles.
pub fn k_numerical_radius(a: &ComplexMatrix, k: usize, num_angles: usize) -> Result<f64> {
    let support = support_grid(a, k, num_angles)?;
    Ok(support.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// `tr(X*AX)/k` for an isometry given by its columns.
pub fn compression_point(a: &ComplexMatrix, columns: &[Vec<Complex64>]) -> Complex64 {
    let d = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for x in columns {
        for i in 0..d {
            let mut row = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                row += a[(i, j)] * xj;
            }
            acc += x[i].conj() * row;
        }
    }
    acc / columns.len() as f64
}

/// Members of `W_k(A)` from random isometries (first `k` columns of Haar
/// unitaries), drawn from `rng`.
pub fn sample_points_with<R: Rng + ?Sized>(
    a: &ComplexMatrix,
    k: usize,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if k < 1 || k > a.dim() {
        return Err(Error::Domain(format!("k = {k} out of range for dim {}", a.dim())));
    }
    Ok((0..count)
        .map(|_| compression_point(a, &random_isometry(a.dim(), k, rng)))
        .collect())
}

/// Seeded variant of [`sample_points_with`].
pub fn sample_points(a: &ComplexMatrix, k: usize, count: usize, seed: u64) -> Result<Vec<Complex64>> {
    sample_points_with(a, k, count, &mut seeded_rng(seed))
}
