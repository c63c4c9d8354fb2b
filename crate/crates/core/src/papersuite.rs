//! Executable checks: the nilpotent counterexample separating `A⊗B` from
//! `A⊗Bᵗ`, instance checks for the block-splitting and orthogonality
//! criteria, the basic properties of `W_k`, and an end-to-end suite over a
//! bipartite shape.
//!
//! The instance checks are implication tests. Each returns [`ImplicationOutcome::Vacuous`]
//! when the hypothesis does not hold, so vacuous cases are never counted as
//! evidence.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::classify::{TrialBank, DEFAULT_TRIALS};
use crate::error::{Error, Result};
use crate::krange::{
    angle_grid, boundary_point, krange_hermitian, krange_hermitian_unchecked, krange_profile, sample_points_with,
    support_defect, support_grid, DEFAULT_NUM_ANGLES, DEFAULT_TOL,
};
use crate::maps::{build_canonical, CanonicalFormSpec, VarphiTag};
use crate::matcore::random::{random_complex, random_haar_unitary, random_hermitian, seeded_rng};
use crate::matcore::{eig_hermitian, eigenvalues_hermitian, is_orthogonal_pair, BipartiteShape, ComplexMatrix};

/// Minimum separation accepted as a strict inequality of ranges.
pub const GAP_THRESHOLD: f64 = 1e-6;

/// `X = [[0,3,0],[0,0,1],[0,0,0]]`.
pub fn example1_block() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 3.0, 0.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0]])
        .expect("3x3 literal")
}

/// `A = X ⊕ O_{m−3}`, `B = X ⊕ O_{n−3}`.
pub fn example1_matrices(m: usize, n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if m < 3 || n < 3 {
        return Err(Error::Domain(format!("the counterexample needs m, n ≥ 3, got ({m}, {n})")));
    }
    let x = example1_block();
    Ok((x.pad_to(m), x.pad_to(n)))
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// Expected Hermitian-part spectra of `A⊗B` and `A⊗Bᵗ` (descending), with
/// `mn − 6` zeros.
pub fn example1_expected_spectra(m: usize, n: usize) -> (Vec<f64>, Vec<f64>) {
    let zeros = m * n - 6;
    let r41 = (41.0_f64 / 2.0).sqrt();
    let r9 = (9.0_f64 / 2.0).sqrt();
    let mut ab = vec![r41, -r41, 1.5, 1.5, -1.5, -1.5];
    let mut abt = vec![4.5, -4.5, r9, -r9, 0.5, -0.5];
    ab.extend(std::iter::repeat_n(0.0, zeros));
    abt.extend(std::iter::repeat_n(0.0, zeros));
    (sorted_desc(ab), sorted_desc(abt))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Example1Report {
    pub m: usize,
    pub n: usize,
    pub spectrum_ab: Vec<f64>,
    pub spectrum_abt: Vec<f64>,
    pub expected_ab: Vec<f64>,
    pub expected_abt: Vec<f64>,
    pub spectrum_error: f64,
    /// `|hi(W_k(Herm A⊗B)) − hi(W_k(Herm A⊗Bᵗ))|` for `k = 1, …, mn − 1`.
    pub hi_gap_per_k: Vec<f64>,
    /// Same for the lower endpoints.
    pub lo_gap_per_k: Vec<f64>,
    /// `hi_gap + lo_gap` per `k`.
    pub re_gap_per_k: Vec<f64>,
    pub pass: bool,
}

/// Compares the computed spectra with the expected ones and measures the
/// endpoint gaps of the real parts of the two ranges for every `k`.
pub fn check_example1(m: usize, n: usize, tol: f64) -> Result<Example1Report> {
    let (a, b) = example1_matrices(m, n)?;
    let herm_ab = a.kron(&b).hermitian_part();
    let herm_abt = a.kron(&b.transpose()).hermitian_part();
    let spectrum_ab = eigenvalues_hermitian(&herm_ab)?;
    let spectrum_abt = eigenvalues_hermitian(&herm_abt)?;
    let (expected_ab, expected_abt) = example1_expected_spectra(m, n);
    let spectrum_error = spectrum_ab
        .iter()
        .zip(&expected_ab)
        .chain(spectrum_abt.iter().zip(&expected_abt))
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    let mut hi_gap_per_k = Vec::new();
    let mut lo_gap_per_k = Vec::new();
    for k in 1..m * n {
        let r1 = krange_hermitian(&herm_ab, k)?;
        let r2 = krange_hermitian(&herm_abt, k)?;
        hi_gap_per_k.push((r1.hi - r2.hi).abs());
        lo_gap_per_k.push((r1.lo - r2.lo).abs());
    }
    let re_gap_per_k: Vec<f64> = hi_gap_per_k.iter().zip(&lo_gap_per_k).map(|(h, l)| h + l).collect();
    let pass = spectrum_error <= tol && re_gap_per_k.iter().all(|g| *g > GAP_THRESHOLD);
    Ok(Example1Report {
        m,
        n,
        spectrum_ab,
        spectrum_abt,
        expected_ab,
        expected_abt,
        spectrum_error,
        hi_gap_per_k,
        lo_gap_per_k,
        re_gap_per_k,
        pass,
    })
}

/// Result of an implication check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImplicationOutcome {
    /// Hypothesis and conclusion both hold.
    Confirmed,
    /// Hypothesis holds, conclusion fails.
    Violated,
    /// Hypothesis fails; nothing was tested.
    Vacuous,
}

impl ImplicationOutcome {
    /// The implication holds (possibly vacuously).
    pub fn holds(&self) -> bool {
        !matches!(self, ImplicationOutcome::Violated)
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(self, ImplicationOutcome::Vacuous)
    }
}

/// If the first `k` diagonal entries of Hermitian `h` sum to its `k` largest
/// eigenvalues, then `h = H_1 ⊕ H_2` with `H_1` carrying exactly those
/// eigenvalues. Tolerances are relative to `1 + ‖h‖_max`.
pub fn check_block_split(h: &ComplexMatrix, k: usize, tol: f64) -> Result<ImplicationOutcome> {
    let d = h.dim();
    if k < 1 || k > d {
        return Err(Error::Domain(format!("k = {k} out of range for dim {d}")));
    }
    let spec = eig_hermitian(h)?;
    let scale = 1.0 + h.max_abs();
    let diag_sum: f64 = (0..k).map(|i| h[(i, i)].re).sum();
    if (diag_sum - spec.top_sum(k)).abs() > tol * scale {
        return Ok(ImplicationOutcome::Vacuous);
    }
    let mut off_block: f64 = 0.0;
    for i in 0..k {
        for j in k..d {
            off_block = off_block.max(h[(i, j)].norm());
        }
    }
    let lead = eigenvalues_hermitian(&h.leading_block(k).hermitian_part())?;
    let lead_err = lead
        .iter()
        .zip(&spec.eigenvalues[..k])
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    Ok(if off_block <= tol * scale && lead_err <= tol * scale {
        ImplicationOutcome::Confirmed
    } else {
        ImplicationOutcome::Violated
    })
}

fn min_eigenvalue(h: &ComplexMatrix) -> Result<f64> {
    Ok(*eigenvalues_hermitian(h)?.last().expect("non-empty spectrum"))
}

/// For positive semidefinite `a`, `b`: if `tr(a)/k = max W_k(a − b)` then `a ⊥ b`.
pub fn check_orthogonality_criterion(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    k: usize,
    tol: f64,
) -> Result<ImplicationOutcome> {
    if a.dim() != b.dim() {
        return Err(Error::Shape(format!("dimensions differ: {} vs {}", a.dim(), b.dim())));
    }
    for (name, x) in [("first", a), ("second", b)] {
        let lowest = min_eigenvalue(x)?;
        if lowest < -tol * (1.0 + x.max_abs()) {
            return Err(Error::Domain(format!("{name} matrix is not positive semidefinite (λ_min = {lowest:e})")));
        }
    }
    let scale = 1.0 + a.max_abs() + b.max_abs();
    let hi = krange_hermitian_unchecked(&(a - b), k)?.hi;
    if (a.trace().re / k as f64 - hi).abs() > tol * scale {
        return Ok(ImplicationOutcome::Vacuous);
    }
    Ok(if is_orthogonal_pair(a, b, tol)? { ImplicationOutcome::Confirmed } else { ImplicationOutcome::Violated })
}

/// `W·Diag(values)·W*` for a Haar `W`.
fn rotated_diag<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> ComplexMatrix {
    let w = random_haar_unitary(values.len(), rng);
    ComplexMatrix::diag_real(values).conjugate_by(&w)
}

/// Instance satisfying the block-splitting hypothesis: `H = H_1 ⊕ H_2` with
/// every eigenvalue of `H_1 ∈ H_k` strictly above every eigenvalue of `H_2`.
pub fn block_split_instance<R: Rng + ?Sized>(rng: &mut R) -> (ComplexMatrix, usize) {
    let k = rng.random_range(1..=3);
    let rest = rng.random_range(1..=3);
    let top: Vec<f64> = (0..k).map(|_| rng.random_range(2.0..5.0)).collect();
    let bottom: Vec<f64> = (0..rest).map(|_| rng.random_range(-1.0..1.5)).collect();
    let h = rotated_diag(&top, rng).direct_sum(&rotated_diag(&bottom, rng));
    (h.hermitian_part(), k)
}

/// Random positive definite matrix `G·G* + I/10`.
fn random_positive<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = random_complex(dim, rng);
    (&(&g * &g.adjoint()) + &ComplexMatrix::identity(dim).scale_real(0.1)).hermitian_part()
}

/// Instance satisfying the orthogonality hypothesis:
/// `A = W(P_1 ⊕ 0 ⊕ 0)W*`, `B = W(0 ⊕ P_2 ⊕ 0)W*`, with `k` between
/// `rank A` and `rank A` plus the size of the shared zero block.
pub fn orthogonality_instance<R: Rng + ?Sized>(rng: &mut R) -> (ComplexMatrix, ComplexMatrix, usize) {
    let r1 = rng.random_range(1..=3);
    let r2 = rng.random_range(1..=3);
    let z = rng.random_range(0..=2);
    let d = r1 + r2 + z;
    let k = rng.random_range(r1..=r1 + z);
    let p1 = random_positive(r1, rng);
    let p2 = random_positive(r2, rng);
    let mut a = p1.pad_to(d);
    let mut b = ComplexMatrix::zeros(r1).direct_sum(&p2);
    if b.dim() < d {
        b = b.pad_to(d);
    }
    let w = random_haar_unitary(d, rng);
    a = a.conjugate_by(&w).hermitian_part();
    b = b.conjugate_by(&w).hermitian_part();
    (a, b, k)
}

/// `V·A·V*` for the first `s` rows `V` of a Haar unitary, so that `VV* = I_s`.
pub fn random_compression<R: Rng + ?Sized>(a: &ComplexMatrix, s: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_haar_unitary(a.dim(), rng);
    let v: DMatrix<_> = u.as_dmatrix().rows(0, s).into_owned();
    let c = &v * a.as_dmatrix() * v.adjoint();
    ComplexMatrix::from_dmatrix(c).expect("compression is square")
}

/// Measured defects of the basic properties of `W_k` on one Hermitian matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RangePropertyCheck {
    pub dim: usize,
    pub k: usize,
    /// Largest distance of a sampled point outside the interval (0 if all inside).
    pub sample_excess: f64,
    /// `|boundary_point(θ=0) − hi|` and `|boundary_point(θ=π) − lo|`, the larger.
    pub endpoint_error: f64,
    /// Endpoint error of `W_k(αI + βH) = α + β·W_k(H)`.
    pub affine_error: f64,
    /// Support defect between profiles of `H` and `UHU*`.
    pub unitary_defect: f64,
    /// Largest support excess of a random compression `VHV*` over `H`.
    pub compression_excess: f64,
    /// Profile of `H` judged real.
    pub hermitian_detected: bool,
    /// Profile of `H + iK` (random Hermitian `K`) judged non-real.
    pub non_hermitian_detected: bool,
}

/// Largest `|Im b_j|` over a profile's boundary points.
pub fn profile_imag_extent(a: &ComplexMatrix, k: usize, num_angles: usize) -> Result<f64> {
    let p = krange_profile(a, k, num_angles)?;
    Ok(p.boundary.iter().fold(0.0_f64, |acc, b| acc.max(b.im.abs())))
}

/// Support grid that also admits `k = dim` (singleton range).
fn support_grid_any_k(a: &ComplexMatrix, k: usize, num_angles: usize) -> Result<Vec<f64>> {
    if k < a.dim() {
        return support_grid(a, k, num_angles);
    }
    let t = a.trace() / a.dim() as f64;
    Ok(angle_grid(num_angles).into_iter().map(|th| t.re * th.cos() + t.im * th.sin()).collect())
}

/// Runs the property checks for Hermitian `h` at range index `k`.
pub fn check_range_properties<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    k: usize,
    num_angles: usize,
    samples: usize,
    rng: &mut R,
) -> Result<RangePropertyCheck> {
    let d = h.dim();
    let interval = krange_hermitian(h, k)?;

    let mut sample_excess: f64 = 0.0;
    for z in sample_points_with(h, k, samples, rng)? {
        sample_excess = sample_excess.max(interval.lo - z.re).max(z.re - interval.hi).max(z.im.abs());
    }

    let top = boundary_point(h, k, 0.0)?;
    let bottom = boundary_point(h, k, PI)?;
    let endpoint_error = (top.re - interval.hi).abs().max((bottom.re - interval.lo).abs()).max(top.im.abs()).max(bottom.im.abs());

    let alpha = rng.random_range(-3.0..3.0);
    let mut beta: f64 = rng.random_range(-2.0..2.0);
    if beta.abs() < 0.1 {
        beta = 0.5;
    }
    let shifted = &ComplexMatrix::identity(d).scale_real(alpha) + &h.scale_real(beta);
    let moved = krange_hermitian(&shifted.hermitian_part(), k)?;
    let (want_lo, want_hi) = if beta >= 0.0 {
        (alpha + beta * interval.lo, alpha + beta * interval.hi)
    } else {
        (alpha + beta * interval.hi, alpha + beta * interval.lo)
    };
    let affine_error = (moved.lo - want_lo).abs().max((moved.hi - want_hi).abs());

    let u = random_haar_unitary(d, rng);
    let base = support_grid(h, k, num_angles)?;
    let conj = support_grid(&h.conjugate_by(&u).hermitian_part(), k, num_angles)?;
    let unitary_defect = support_defect(&base, &conj)?;

    let s = rng.random_range(k..=d);
    let compressed = random_compression(h, s, rng).hermitian_part();
    let comp = support_grid_any_k(&compressed, k, num_angles)?;
    let compression_excess = comp.iter().zip(&base).fold(0.0_f64, |acc, (c, b)| acc.max(c - b));

    let detect_tol = 1e-9 * (1.0 + h.max_abs());
    let hermitian_detected = profile_imag_extent(h, k, num_angles)? <= detect_tol;
    let skew = random_hermitian(d, rng);
    let non_herm = h + &skew.scale(num_complex::Complex64::new(0.0, 1.0));
    let non_hermitian_detected = profile_imag_extent(&non_herm, k, num_angles)? > 1e-9 * (1.0 + non_herm.max_abs());

    Ok(RangePropertyCheck {
        dim: d,
        k,
        sample_excess,
        endpoint_error,
        affine_error,
        unitary_defect,
        compression_excess,
        hermitian_detected,
        non_hermitian_detected,
    })
}

/// Largest endpoint mismatch of `(n−k)·W_{n−k}(H) = tr H − k·W_k(H)` over all `k`.
pub fn complement_identity_error(h: &ComplexMatrix) -> Result<f64> {
    let n = h.dim();
    let tr = h.trace().re;
    let mut worst: f64 = 0.0;
    for k in 1..n {
        let wk = krange_hermitian(h, k)?;
        let wc = krange_hermitian(h, n - k)?;
        let c = (n - k) as f64;
        let kf = k as f64;
        worst = worst.max((c * wc.lo - (tr - kf * wk.hi)).abs()).max((c * wc.hi - (tr - kf * wk.lo)).abs());
    }
    Ok(worst)
}

/// One line of the suite summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteItem {
    pub item: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub trials: usize,
    pub num_angles: usize,
    pub tol: f64,
    /// Random matrices for the property checks.
    pub property_matrices: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { trials: DEFAULT_TRIALS, num_angles: DEFAULT_NUM_ANGLES, tol: DEFAULT_TOL, property_matrices: 20 }
    }
}

/// Sufficiency, necessity witnesses, property checks, the complement
/// identity and (for `m, n ≥ 3`) the counterexample, in that order.
pub fn theorem_suite(shape: &BipartiteShape, seed: u64, config: &SuiteConfig) -> Result<Vec<SuiteItem>> {
    let mut items = Vec::new();
    let mut rng = seeded_rng(seed);
    let bank = TrialBank::new(*shape, config.trials, config.num_angles, seed)?;
    let affine_options: &[bool] = if shape.is_half() { &[false, true] } else { &[false] };

    for &affine in affine_options {
        for varphi in VarphiTag::ALL {
            let u = random_haar_unitary(shape.dim(), &mut rng);
            let spec = CanonicalFormSpec::new(varphi, u, affine, *shape)?;
            let report = bank.verify(&build_canonical(&spec)?, config.tol)?;
            let kind = if affine { "affine" } else { "plain" };
            let (group, pass) = if spec.theorem_valid() {
                ("sufficiency", report.passed())
            } else {
                ("necessity", !report.passed())
            };
            items.push(SuiteItem {
                item: format!("{group}/{varphi}/{kind}"),
                pass,
                detail: json!({
                    "theorem_valid": spec.theorem_valid(),
                    "verdict": report.verdict,
                    "max_support_defect": report.max_support_defect,
                    "witness_trials": report.witnesses.iter().map(|w| w.trial).collect::<Vec<_>>(),
                }),
            });
        }
    }
    if !shape.is_half() {
        let rejected = CanonicalFormSpec::new(VarphiTag::Identity, ComplexMatrix::identity(shape.dim()), true, *shape).is_err();
        items.push(SuiteItem {
            item: "necessity/affine_rejected".into(),
            pass: rejected,
            detail: json!({ "mn": shape.dim(), "k": shape.k() }),
        });
    }

    let mut worst = json!({});
    let mut prop_pass = true;
    let (mut samp, mut endp, mut aff, mut uni, mut comp) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let mut misclassified = 0;
    for _ in 0..config.property_matrices {
        let h = random_hermitian(shape.dim(), &mut rng);
        let c = check_range_properties(&h, shape.k(), config.num_angles, 50, &mut rng)?;
        samp = samp.max(c.sample_excess);
        endp = endp.max(c.endpoint_error);
        aff = aff.max(c.affine_error);
        uni = uni.max(c.unitary_defect);
        comp = comp.max(c.compression_excess);
        misclassified += usize::from(!c.hermitian_detected) + usize::from(!c.non_hermitian_detected);
    }
    prop_pass &= samp <= 1e-9 && endp <= 1e-9 && aff <= 1e-10 && uni <= config.tol && comp <= 1e-9 && misclassified == 0;
    if let serde_json::Value::Object(map) = &mut worst {
        map.insert("sample_excess".into(), json!(samp));
        map.insert("endpoint_error".into(), json!(endp));
        map.insert("affine_error".into(), json!(aff));
        map.insert("unitary_defect".into(), json!(uni));
        map.insert("compression_excess".into(), json!(comp));
        map.insert("misclassified".into(), json!(misclassified));
    }
    items.push(SuiteItem { item: "range_properties".into(), pass: prop_pass, detail: worst });

    let mut comp_err: f64 = 0.0;
    for _ in 0..config.property_matrices {
        comp_err = comp_err.max(complement_identity_error(&random_hermitian(shape.dim(), &mut rng))?);
    }
    items.push(SuiteItem {
        item: "complement_identity".into(),
        pass: comp_err <= 1e-10,
        detail: json!({ "max_error": comp_err }),
    });

    if shape.m() >= 3 && shape.n() >= 3 {
        let r = check_example1(shape.m(), shape.n(), 1e-10)?;
        items.push(SuiteItem {
            item: "example1".into(),
            pass: r.pass,
            detail: json!({
                "spectrum_error": r.spectrum_error,
                "min_re_gap": r.re_gap_per_k.iter().copied().fold(f64::INFINITY, f64::min),
            }),
        });
    }
    Ok(items)
}
