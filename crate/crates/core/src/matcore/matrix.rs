use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::shape::BipartiteShape;
use crate::error::{Error, Result};

/// Dense square complex matrix.
///
/// Thin wrapper over a nalgebra `DMatrix` that keeps the matrix square and
/// provides the handful of operations the range and map code need.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

/// Which tensor factor a partial transpose acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `A ⊗ B ↦ Aᵗ ⊗ B`: transposes the block pattern.
    Left,
    /// `A ⊗ B ↦ A ⊗ Bᵗ`: transposes every block in place.
    Right,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self(DMatrix::from_fn(dim, dim, f))
    }

    /// Builds a matrix from `dim²` entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    /// Real-valued convenience constructor, rows given as slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<Complex64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, &entries)
    }

    pub fn from_dmatrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::Shape(format!(
                "matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self(m))
    }

    /// Matrix unit `E_ij`.
    pub fn unit(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn diag(values: &[Complex64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<Complex64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest entry modulus, `‖·‖_max`.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `(A + A*)/2`, with entry `(j,i)` written as the conjugate of entry `(i,j)`
    /// so the result is Hermitian bit-for-bit.
    pub fn hermitian_part(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(d);
        for i in 0..d {
            out.0[(i, i)] = Complex64::new(self.0[(i, i)].re, 0.0);
            for j in (i + 1)..d {
                let z = (self.0[(i, j)] + self.0[(j, i)].conj()) * 0.5;
                out.0[(i, j)] = z;
                out.0[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `(A − A*)/(2i)`, exactly Hermitian, so that `A = H + iK`.
    pub fn skew_hermitian_part(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(d);
        for i in 0..d {
            out.0[(i, i)] = Complex64::new(self.0[(i, i)].im, 0.0);
            for j in (i + 1)..d {
                // (a_ij − conj(a_ji)) / (2i)
                let z = (self.0[(i, j)] - self.0[(j, i)].conj()) * Complex64::new(0.0, -0.5);
                out.0[(i, j)] = z;
                out.0[(j, i)] = z.conj();
            }
        }
        out
    }

    /// `‖A − A*‖_max`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermitian to relative tolerance: `‖A − A*‖_max ≤ tol·(1 + ‖A‖_max)`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol * (1.0 + self.max_abs())
    }

    /// Kronecker product; `(A⊗B)[i·n+p, j·n+q] = A[i,j]·B[p,q]`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Block-diagonal `A ⊕ B`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let mut out = Self::zeros(a + b);
        out.0.view_mut((0, 0), (a, a)).copy_from(&self.0);
        out.0.view_mut((a, a), (b, b)).copy_from(&other.0);
        out
    }

    /// Zero-pads to `dim`, keeping `self` as the leading block.
    pub fn pad_to(&self, dim: usize) -> Self {
        assert!(dim >= self.dim());
        if dim == self.dim() {
            return self.clone();
        }
        self.direct_sum(&Self::zeros(dim - self.dim()))
    }

    /// Leading principal `size × size` block.
    pub fn leading_block(&self, size: usize) -> Self {
        Self(self.0.view((0, 0), (size, size)).into_owned())
    }

    /// Transpose of one tensor factor, viewing `self` as `m × m` blocks of `n × n`.
    pub fn partial_transpose(&self, shape: &BipartiteShape, side: Side) -> Result<Self> {
        let (m, n) = (shape.m(), shape.n());
        if self.dim() != m * n {
            return Err(Error::Shape(format!(
                "partial transpose needs a {}x{} matrix for (m, n) = ({m}, {n}), got dim {}",
                m * n,
                m * n,
                self.dim()
            )));
        }
        Ok(Self::from_fn(m * n, |r, c| {
            let (i, p) = (r / n, r % n);
            let (j, q) = (c / n, c % n);
            match side {
                Side::Right => self.0[(i * n + q, j * n + p)],
                Side::Left => self.0[(j * n + p, i * n + q)],
            }
        }))
    }

    /// Entrywise `max |a_ij − b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// Unitary to tolerance: `‖U*U − I‖_max ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let g = Self(self.0.adjoint() * &self.0);
        g.max_abs_diff(&Self::identity(self.dim())) <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `U·self·U*`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        Self(&u.0 * &self.0 * u.0.adjoint())
    }
}

/// `A ⊥ B` in the sense `AB* = A*B = 0`, tested as
/// `‖AB*‖_max, ‖A*B‖_max ≤ tol·(1+‖A‖_max)(1+‖B‖_max)`.
pub fn is_orthogonal_pair(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!(
            "orthogonality test needs equal dimensions, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let scale = (1.0 + a.max_abs()) * (1.0 + b.max_abs());
    let ab_star = a * &b.adjoint();
    let a_star_b = &a.adjoint() * b;
    Ok(ab_star.max_abs() <= tol * scale && a_star_b.max_abs() <= tol * scale)
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn shape(m: usize, n: usize) -> BipartiteShape {
        BipartiteShape::new(m, n, 1).unwrap()
    }

    #[test]
    fn kron_of_units_and_identities() {
        let e11 = ComplexMatrix::unit(2, 0, 0);
        assert_eq!(e11.kron(&e11), ComplexMatrix::unit(4, 0, 0));
        assert_eq!(
            ComplexMatrix::identity(3).kron(&ComplexMatrix::identity(2)),
            ComplexMatrix::identity(6)
        );
    }

    #[test]
    fn kron_block_layout() {
        let a = ComplexMatrix::from_fn(2, |i, j| c((i * 2 + j) as f64 + 1.0, 0.5));
        let b = ComplexMatrix::from_fn(3, |p, q| c(p as f64, q as f64 - 1.0));
        let ab = a.kron(&b);
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..3 {
                    for q in 0..3 {
                        assert_eq!(ab[(i * 3 + p, j * 3 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn hermitian_part_of_skew_is_zero() {
        let a = ComplexMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
        assert_eq!(a.hermitian_part(), ComplexMatrix::zeros(2));
    }

    #[test]
    fn hermitian_and_skew_parts_recombine() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64 - 2.0 * j as f64, (i * j) as f64 + 0.25));
        let h = a.hermitian_part();
        let k = a.skew_hermitian_part();
        assert_eq!(h.hermitian_defect(), 0.0);
        assert_eq!(k.hermitian_defect(), 0.0);
        let back = &h + &k.scale(c(0.0, 1.0));
        assert!(back.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn transpose_of_unit() {
        assert_eq!(ComplexMatrix::unit(2, 0, 1).transpose(), ComplexMatrix::unit(2, 1, 0));
    }

    #[test]
    fn partial_transpose_single_block() {
        let x = ComplexMatrix::unit(2, 0, 0).kron(&ComplexMatrix::unit(2, 0, 1));
        let want = ComplexMatrix::unit(2, 0, 0).kron(&ComplexMatrix::unit(2, 1, 0));
        assert_eq!(x.partial_transpose(&shape(2, 2), Side::Right).unwrap(), want);
    }

    #[test]
    fn partial_transpose_on_products() {
        let a = ComplexMatrix::from_fn(2, |i, j| c(i as f64 + 3.0 * j as f64, j as f64));
        let b = ComplexMatrix::from_fn(3, |p, q| c(2.0 * p as f64 - q as f64, (p + q) as f64));
        let s = shape(2, 3);
        let ab = a.kron(&b);
        assert_eq!(ab.partial_transpose(&s, Side::Right).unwrap(), a.kron(&b.transpose()));
        assert_eq!(ab.partial_transpose(&s, Side::Left).unwrap(), a.transpose().kron(&b));
    }

    #[test]
    fn partial_transpose_rejects_wrong_dim() {
        let x = ComplexMatrix::identity(5);
        assert!(matches!(
            x.partial_transpose(&shape(2, 2), Side::Left),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn orthogonality_examples() {
        let e11 = ComplexMatrix::unit(2, 0, 0);
        let e22 = ComplexMatrix::unit(2, 1, 1);
        let e12 = ComplexMatrix::unit(2, 0, 1);
        assert!(is_orthogonal_pair(&e11, &e22, 1e-12).unwrap());
        assert!(!is_orthogonal_pair(&e11, &e12, 1e-12).unwrap());
        assert!(is_orthogonal_pair(&e11, &ComplexMatrix::identity(3), 1e-12).is_err());
    }

    #[test]
    fn row_major_round_trip() {
        let a = ComplexMatrix::from_fn(3, |i, j| c(i as f64, j as f64));
        let back = ComplexMatrix::from_row_major(3, &a.row_major()).unwrap();
        assert_eq!(a, back);
        assert!(ComplexMatrix::from_row_major(3, &a.row_major()[..8]).is_err());
        let mut bad = a.row_major();
        bad[4] = c(f64::NAN, 0.0);
        assert!(matches!(ComplexMatrix::from_row_major(3, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn direct_sum_and_padding() {
        let a = ComplexMatrix::identity(2);
        let p = a.pad_to(4);
        assert_eq!(p, ComplexMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0]));
        assert_eq!(p.leading_block(2), a);
    }
}
