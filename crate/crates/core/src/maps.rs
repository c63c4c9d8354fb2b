//! Linear maps on `M_mn` as explicit `(mn)² × (mn)²` matrices acting on
//! column-stacked matrices, and the canonical forms that preserve `W_k` on
//! tensor products:
//!
//! * plain: `X ↦ U·φ(X)·U*`
//! * affine (only when `mn = 2k`): `X ↦ (tr X / k)·I − U·φ(X)·U*`
//!
//! where `φ` is the identity, the full transpose, or one of the two partial
//! transposes.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{BipartiteShape, ComplexMatrix, Side};

/// Unitarity tolerance for canonical-form unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Column stacking: `vec(X)[j·d + i] = X[i, j]`.
pub fn vec(x: &ComplexMatrix) -> Vec<Complex64> {
    let d = x.dim();
    let mut out = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            out.push(x[(i, j)]);
        }
    }
    out
}

/// Inverse of [`vec`].
pub fn unvec(v: &[Complex64]) -> Result<ComplexMatrix> {
    let d = (v.len() as f64).sqrt().round() as usize;
    if d == 0 || d * d != v.len() {
        return Err(Error::Shape(format!("vector of length {} is not a vectorized square matrix", v.len())));
    }
    Ok(ComplexMatrix::from_fn(d, |i, j| v[j * d + i]))
}

/// The map `φ` applied before unitary conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarphiTag {
    #[serde(rename = "id")]
    Identity,
    #[serde(rename = "t")]
    FullTranspose,
    /// `A ⊗ B ↦ A ⊗ Bᵗ`
    #[serde(rename = "pt_right")]
    PartialRight,
    /// `A ⊗ B ↦ Aᵗ ⊗ B`
    #[serde(rename = "pt_left")]
    PartialLeft,
}

impl VarphiTag {
    pub const ALL: [VarphiTag; 4] = [
        VarphiTag::Identity,
        VarphiTag::FullTranspose,
        VarphiTag::PartialRight,
        VarphiTag::PartialLeft,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            VarphiTag::Identity => "id",
            VarphiTag::FullTranspose => "t",
            VarphiTag::PartialRight => "pt_right",
            VarphiTag::PartialLeft => "pt_left",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Format(format!("unknown varphi tag {s:?} (expected id, t, pt_right or pt_left)")))
    }

    /// Whether this tag yields a preserver for the given factor sizes.
    pub fn is_valid_for(&self, shape: &BipartiteShape) -> bool {
        match self {
            VarphiTag::Identity | VarphiTag::FullTranspose => true,
            VarphiTag::PartialRight | VarphiTag::PartialLeft => shape.m().min(shape.n()) <= 2,
        }
    }

    /// Applies `φ` to `x ∈ M_mn`. Every tag is an involution.
    pub fn apply(&self, x: &ComplexMatrix, shape: &BipartiteShape) -> Result<ComplexMatrix> {
        if x.dim() != shape.dim() {
            return Err(Error::Shape(format!("expected a {0}x{0} matrix, got dim {1}", shape.dim(), x.dim())));
        }
        match self {
            VarphiTag::Identity => Ok(x.clone()),
            VarphiTag::FullTranspose => Ok(x.transpose()),
            VarphiTag::PartialRight => x.partial_transpose(shape, Side::Right),
            VarphiTag::PartialLeft => x.partial_transpose(shape, Side::Left),
        }
    }
}

impl fmt::Display for VarphiTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `(tr X / k)·I − X`.
pub fn affine_reflect(x: &ComplexMatrix, k: usize) -> ComplexMatrix {
    let t = x.trace() / k as f64;
    &ComplexMatrix::identity(x.dim()).scale(t) - x
}

/// One canonical preserver shape: `φ`, the unitary `U` and the affine flag.
#[derive(Debug, Clone)]
pub struct CanonicalFormSpec {
    varphi: VarphiTag,
    unitary: ComplexMatrix,
    affine: bool,
    shape: BipartiteShape,
}

impl CanonicalFormSpec {
    /// Checks that `U` is unitary and that the affine flag is only set when `mn = 2k`.
    ///
    /// Forms that are not preservers (partial transposes with `m, n ≥ 3`) are
    /// still constructible; see [`Self::theorem_valid`].
    pub fn new(varphi: VarphiTag, unitary: ComplexMatrix, affine: bool, shape: BipartiteShape) -> Result<Self> {
        if unitary.dim() != shape.dim() {
            return Err(Error::Shape(format!(
                "unitary must be {0}x{0} for (m, n) = ({1}, {2}), got dim {3}",
                shape.dim(),
                shape.m(),
                shape.n(),
                unitary.dim()
            )));
        }
        if !unitary.is_unitary(UNITARY_TOL) {
            return Err(Error::Domain("canonical form requires a unitary matrix".into()));
        }
        if affine && !shape.is_half() {
            return Err(Error::Domain(format!(
                "affine form needs mn = 2k, got m·n = {} and k = {}",
                shape.dim(),
                shape.k()
            )));
        }
        Ok(Self { varphi, unitary, affine, shape })
    }

    pub fn varphi(&self) -> VarphiTag {
        self.varphi
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn affine(&self) -> bool {
        self.affine
    }

    pub fn shape(&self) -> &BipartiteShape {
        &self.shape
    }

    /// True iff this form preserves `W_k` on all tensor products.
    pub fn theorem_valid(&self) -> bool {
        self.varphi.is_valid_for(&self.shape)
    }

    /// Direct evaluation, independent of the matrix representation.
    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let y = self.varphi.apply(x, &self.shape)?.conjugate_by(&self.unitary);
        if self.affine {
            let t = x.trace() / self.shape.k() as f64;
            Ok(&ComplexMatrix::identity(x.dim()).scale(t) - &y)
        } else {
            Ok(y)
        }
    }
}

/// A linear map on `M_mn` stored as the matrix `M` with `vec(Φ(X)) = M·vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMapMatrix {
    shape: BipartiteShape,
    matrix: ComplexMatrix,
}

impl LinearMapMatrix {
    pub fn new(shape: BipartiteShape, matrix: ComplexMatrix) -> Result<Self> {
        let d = shape.dim();
        if matrix.dim() != d * d {
            return Err(Error::Shape(format!(
                "map on M_{d} needs a {0}x{0} matrix, got dim {1}",
                d * d,
                matrix.dim()
            )));
        }
        Ok(Self { shape, matrix })
    }

    /// Tabulates `f` on the matrix units: column `q·d + p` is `vec(f(E_pq))`.
    pub fn from_fn(shape: BipartiteShape, mut f: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>) -> Result<Self> {
        let d = shape.dim();
        let mut matrix = ComplexMatrix::zeros(d * d);
        for q in 0..d {
            for p in 0..d {
                let image = f(&ComplexMatrix::unit(d, p, q))?;
                if image.dim() != d {
                    return Err(Error::Shape(format!("map image has dim {}, expected {d}", image.dim())));
                }
                let col = q * d + p;
                for (row, z) in vec(&image).into_iter().enumerate() {
                    matrix[(row, col)] = z;
                }
            }
        }
        Ok(Self { shape, matrix })
    }

    pub fn identity(shape: BipartiteShape) -> Self {
        let d = shape.dim();
        Self { shape, matrix: ComplexMatrix::identity(d * d) }
    }

    /// `X ↦ (tr X / k)·I − X` with `k` taken from the shape.
    pub fn affine_reflection(shape: BipartiteShape) -> Self {
        let k = shape.k();
        Self::from_fn(shape, |x| Ok(affine_reflect(x, k))).expect("reflection preserves dimension")
    }

    pub fn shape(&self) -> &BipartiteShape {
        &self.shape
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.dim() != self.shape.dim() {
            return Err(Error::Shape(format!(
                "map acts on {0}x{0} matrices, got dim {1}",
                self.shape.dim(),
                x.dim()
            )));
        }
        let v = vec(x);
        let n = v.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (c, vc) in v.iter().enumerate() {
                acc += self.matrix[(r, c)] * vc;
            }
            *o = acc;
        }
        unvec(&out)
    }

    /// `self ∘ inner`, i.e. `X ↦ self(inner(X))`.
    pub fn compose(&self, inner: &LinearMapMatrix) -> Result<Self> {
        if self.shape.dim() != inner.shape.dim() {
            return Err(Error::Shape("cannot compose maps on different spaces".into()));
        }
        Ok(Self { shape: self.shape, matrix: &self.matrix * &inner.matrix })
    }

    /// Largest entry difference between the two map matrices.
    pub fn max_abs_diff(&self, other: &LinearMapMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    /// `Σ_{p,q} E_pq ⊗ Φ(E_pq)` over the matrix units of `M_mn`.
    pub fn choi_matrix(&self) -> ComplexMatrix {
        let d = self.shape.dim();
        // Φ(E_pq)[i, j] = M[j·d + i, q·d + p]
        ComplexMatrix::from_fn(d * d, |r, c| {
            let (p, i) = (r / d, r % d);
            let (q, j) = (c / d, c % d);
            self.matrix[(j * d + i, q * d + p)]
        })
    }

    /// Inverse of [`Self::choi_matrix`].
    pub fn from_choi(shape: BipartiteShape, choi: &ComplexMatrix) -> Result<Self> {
        let d = shape.dim();
        if choi.dim() != d * d {
            return Err(Error::Shape(format!("Choi matrix must be {0}x{0}, got dim {1}", d * d, choi.dim())));
        }
        let matrix = ComplexMatrix::from_fn(d * d, |r, c| {
            let (j, i) = (r / d, r % d);
            let (q, p) = (c / d, c % d);
            choi[(p * d + i, q * d + j)]
        });
        Ok(Self { shape, matrix })
    }
}

/// Matrix of the canonical map described by `spec`.
pub fn build_canonical(spec: &CanonicalFormSpec) -> Result<LinearMapMatrix> {
    LinearMapMatrix::from_fn(*spec.shape(), |x| spec.evaluate(x))
}

/// The map `Y ↦ φ(U*·Y·U)` (plain) or `Y ↦ φ(U*·R(Y)·U)` (affine, with `R`
/// the trace reflection), which inverts [`build_canonical`].
pub fn build_canonical_inverse(spec: &CanonicalFormSpec) -> Result<LinearMapMatrix> {
    let shape = *spec.shape();
    let u_star = spec.unitary().adjoint();
    LinearMapMatrix::from_fn(shape, |y| {
        let y = if spec.affine() { affine_reflect(y, shape.k()) } else { y.clone() };
        spec.varphi().apply(&y.conjugate_by(&u_star), &shape)
    })
}
