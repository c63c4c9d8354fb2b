//! Deciding whether a linear map preserves `W_k` on tensor products, and
//! recovering the canonical form of a preserver.
//!
//! Verification compares sampled support functions of `W_k(A⊗B)` and
//! `W_k(Φ(A⊗B))` over a seeded bank of factor pairs. Classification tries
//! every candidate `(φ, affine)`: undoing `φ` (and the trace reflection)
//! must leave a unitary conjugation, whose Choi matrix is rank one with
//! top eigenvector `vec(U)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krange::{angle_grid, support_defect, support_grid, DEFAULT_NUM_ANGLES};
use crate::maps::{unvec, CanonicalFormSpec, LinearMapMatrix, VarphiTag};
use crate::matcore::random::{random_complex, random_hermitian, seeded_rng};
use crate::matcore::{eig_hermitian, BipartiteShape, ComplexMatrix};
use crate::papersuite::example1_matrices;

/// Seed used when the caller does not pick one.
pub const DEFAULT_SEED: u64 = 20_240_917;
pub const DEFAULT_TRIALS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// A trial whose support functions disagreed beyond tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Witness {
    pub trial: usize,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    /// Angle of the largest discrepancy.
    pub theta: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub trials: usize,
    pub num_angles: usize,
    pub tol: f64,
    /// Largest relative support discrepancy over all trials.
    pub max_support_defect: f64,
    pub witnesses: Vec<Witness>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Factor pairs `(A, B)` and the support functions of `W_k(A⊗B)`, computed
/// once and reused when several maps are checked on the same trials.
///
/// Trial 0 is the deterministic witness: the nilpotent counterexample pair
/// when `m, n ≥ 3`, otherwise `(E_11, E_11)`. Later trials alternate random
/// Hermitian (odd) and random complex (even) factors.
#[derive(Debug, Clone)]
pub struct TrialBank {
    shape: BipartiteShape,
    num_angles: usize,
    pairs: Vec<(ComplexMatrix, ComplexMatrix)>,
    products: Vec<ComplexMatrix>,
    reference: Vec<Vec<f64>>,
}

impl TrialBank {
    pub fn new(shape: BipartiteShape, trials: usize, num_angles: usize, seed: u64) -> Result<Self> {
        if trials < 1 {
            return Err(Error::Domain("verification needs at least one trial".into()));
        }
        let mut rng = seeded_rng(seed);
        let (m, n) = (shape.m(), shape.n());
        let mut pairs = Vec::with_capacity(trials);
        pairs.push(witness_pair(&shape)?);
        for t in 1..trials {
            let pair = if t % 2 == 1 {
                (random_hermitian(m, &mut rng), random_hermitian(n, &mut rng))
            } else {
                (random_complex(m, &mut rng), random_complex(n, &mut rng))
            };
            pairs.push(pair);
        }
        let products: Vec<ComplexMatrix> = pairs.iter().map(|(a, b)| a.kron(b)).collect();
        let reference = products
            .iter()
            .map(|x| support_grid(x, shape.k(), num_angles))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { shape, num_angles, pairs, products, reference })
    }

    pub fn shape(&self) -> &BipartiteShape {
        &self.shape
    }

    pub fn trials(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(ComplexMatrix, ComplexMatrix)] {
        &self.pairs
    }

    /// Runs every trial of the bank against `map`.
    pub fn verify(&self, map: &LinearMapMatrix, tol: f64) -> Result<VerificationReport> {
        if map.shape().dim() != self.shape.dim() {
            return Err(Error::Shape(format!(
                "map acts on M_{} but the trials live in M_{}",
                map.shape().dim(),
                self.shape.dim()
            )));
        }
        let angles = angle_grid(self.num_angles);
        let mut max_defect: f64 = 0.0;
        let mut witnesses = Vec::new();
        for (t, (x, reference)) in self.products.iter().zip(&self.reference).enumerate() {
            let image = map.apply(x)?;
            let support = support_grid(&image, self.shape.k(), self.num_angles)?;
            let defect = support_defect(reference, &support)?;
            max_defect = max_defect.max(defect);
            if defect > tol {
                let worst = (0..angles.len())
                    .max_by(|&i, &j| {
                        let di = (reference[i] - support[i]).abs();
                        let dj = (reference[j] - support[j]).abs();
                        di.total_cmp(&dj)
                    })
                    .unwrap_or(0);
                let (a, b) = self.pairs[t].clone();
                witnesses.push(Witness { trial: t, a, b, theta: angles[worst], defect });
            }
        }
        let verdict = if max_defect <= tol { Verdict::Pass } else { Verdict::Fail };
        Ok(VerificationReport {
            trials: self.trials(),
            num_angles: self.num_angles,
            tol,
            max_support_defect: max_defect,
            witnesses,
            verdict,
        })
    }
}

fn witness_pair(shape: &BipartiteShape) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (m, n) = (shape.m(), shape.n());
    if m >= 3 && n >= 3 {
        example1_matrices(m, n)
    } else {
        Ok((ComplexMatrix::unit(m, 0, 0), ComplexMatrix::unit(n, 0, 0)))
    }
}

/// Checks `W_k(Φ(A⊗B)) = W_k(A⊗B)` on `trials` seeded factor pairs.
pub fn verify_preserver(
    map: &LinearMapMatrix,
    shape: &BipartiteShape,
    trials: usize,
    num_angles: usize,
    tol: f64,
    seed: u64,
) -> Result<VerificationReport> {
    TrialBank::new(*shape, trials, num_angles, seed)?.verify(map, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassVerdict {
    Classified,
    NotAPreserver,
    Ambiguous,
}

/// Choi spectrum summary for one candidate `(φ, affine)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateGap {
    pub varphi: VarphiTag,
    pub affine: bool,
    /// Whether the corrected map's Choi matrix was Hermitian; the
    /// eigenvalue fields are only meaningful when it was.
    pub hermitian: bool,
    pub top: Option<f64>,
    pub second: Option<f64>,
    /// `second / trace` of the Choi matrix.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchedForm {
    pub varphi: VarphiTag,
    pub affine: bool,
    /// Recovered unitary, phase-normalized.
    pub unitary: ComplexMatrix,
    /// `max |Φ(E) − candidate(E)|` over the matrix units of `M_mn`.
    pub residual: f64,
}

impl MatchedForm {
    pub fn rebuild(&self, shape: &BipartiteShape) -> Result<LinearMapMatrix> {
        canonical_unchecked(self.varphi, &self.unitary, self.affine, shape)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tol: f64,
    pub matched: Option<MatchedForm>,
    /// Every candidate that passed, in candidate order.
    pub all_matches: Vec<MatchedForm>,
    pub choi_gaps: Vec<CandidateGap>,
    pub verdict: ClassVerdict,
}

/// Multiplies `u` by the phase that makes its largest-modulus entry real
/// and positive (first such entry in row-major order).
pub fn normalize_phase(u: &ComplexMatrix) -> ComplexMatrix {
    let d = u.dim();
    let mut best = (0.0, Complex64::new(1.0, 0.0));
    for i in 0..d {
        for j in 0..d {
            let z = u[(i, j)];
            if z.norm() > best.0 {
                best = (z.norm(), z);
            }
        }
    }
    if best.0 == 0.0 {
        return u.clone();
    }
    u.scale(best.1.conj() / best.0)
}

/// Canonical map from parts, without insisting that `u` be unitary.
fn canonical_unchecked(
    varphi: VarphiTag,
    u: &ComplexMatrix,
    affine: bool,
    shape: &BipartiteShape,
) -> Result<LinearMapMatrix> {
    let k = shape.k() as f64;
    LinearMapMatrix::from_fn(*shape, |x| {
        let y = varphi.apply(x, shape)?.conjugate_by(u);
        Ok(if affine {
            &ComplexMatrix::identity(x.dim()).scale(x.trace() / k) - &y
        } else {
            y
        })
    })
}

/// Identifies which canonical form `map` is, if any.
pub fn classify_preserver(map: &LinearMapMatrix, shape: &BipartiteShape, tol: f64) -> Result<ClassificationReport> {
    let d = shape.dim();
    if map.shape().dim() != d {
        return Err(Error::Shape(format!("map acts on M_{} but shape says M_{d}", map.shape().dim())));
    }
    let reflection = LinearMapMatrix::affine_reflection(*shape);
    let affine_options: &[bool] = if shape.is_half() { &[false, true] } else { &[false] };
    let mut gaps = Vec::new();
    let mut matches = Vec::new();
    for &affine in affine_options {
        for varphi in VarphiTag::ALL {
            let undo = LinearMapMatrix::from_fn(*shape, |x| varphi.apply(x, shape))?;
            let mut corrected = map.compose(&undo)?;
            if affine {
                corrected = reflection.compose(&corrected)?;
            }
            let choi = corrected.choi_matrix();
            if !choi.is_hermitian(tol) {
                gaps.push(CandidateGap { varphi, affine, hermitian: false, top: None, second: None, ratio: None });
                continue;
            }
            let spec = eig_hermitian(&choi)?;
            let trace = choi.trace().re;
            let (top, second) = (spec.eigenvalues[0], spec.eigenvalues[1]);
            let bottom = *spec.eigenvalues.last().expect("non-empty spectrum");
            let ratio = (trace.abs() > 0.0).then(|| second / trace);
            gaps.push(CandidateGap {
                varphi,
                affine,
                hermitian: true,
                top: Some(top),
                second: Some(second),
                ratio,
            });
            let rank_one = trace > 0.0 && second <= tol * trace && bottom >= -tol * trace;
            if !rank_one || top <= 0.0 {
                continue;
            }
            let w: Vec<Complex64> = (0..d * d).map(|r| spec.frame[(r, 0)] * top.sqrt()).collect();
            let u = normalize_phase(&unvec(&w)?);
            if !u.is_unitary(tol.max(1e-12)) {
                continue;
            }
            let candidate = canonical_unchecked(varphi, &u, affine, shape)?;
            let residual = map.max_abs_diff(&candidate);
            if residual <= tol {
                matches.push(MatchedForm { varphi, affine, unitary: u, residual });
            }
        }
    }
    let verdict = match matches.len() {
        0 => ClassVerdict::NotAPreserver,
        _ => {
            let first = matches[0].rebuild(shape)?;
            let mut all_same = true;
            for other in &matches[1..] {
                if other.rebuild(shape)?.max_abs_diff(&first) > tol {
                    all_same = false;
                }
            }
            if all_same {
                ClassVerdict::Classified
            } else {
                ClassVerdict::Ambiguous
            }
        }
    };
    let matched = (verdict == ClassVerdict::Classified).then(|| matches[0].clone());
    Ok(ClassificationReport { tol, matched, all_matches: matches, choi_gaps: gaps, verdict })
}

/// Partial traces of a `d² × d²` matrix viewed as `M_d ⊗ M_d`.
fn partial_traces(c: &ComplexMatrix, d: usize) -> (ComplexMatrix, ComplexMatrix) {
    // first: trace over the first factor; second: trace over the second factor
    let first = ComplexMatrix::from_fn(d, |i, j| (0..d).map(|p| c[(p * d + i, p * d + j)]).sum());
    let second = ComplexMatrix::from_fn(d, |p, q| (0..d).map(|i| c[(p * d + i, q * d + i)]).sum());
    (first, second)
}

/// A random unital, trace-preserving, Hermiticity-preserving map: a random
/// positive Choi matrix projected (in Frobenius norm) onto the affine
/// subspace where both partial traces equal the identity.
pub fn random_unital_trace_preserving<R: Rng + ?Sized>(shape: &BipartiteShape, rng: &mut R) -> Result<LinearMapMatrix> {
    let d = shape.dim();
    let g = random_complex(d * d, rng);
    let mut choi = &g * &g.adjoint();
    choi = choi.hermitian_part();
    choi = choi.scale_real(d as f64 / choi.trace().re);
    let id = ComplexMatrix::identity(d);
    let (tr_first, tr_second) = partial_traces(&choi, d);
    let excess = choi.trace().re - d as f64;
    let dd = d as f64;
    let correction = &(&(&tr_second - &id).kron(&id).scale_real(1.0 / dd)
        + &id.kron(&(&tr_first - &id)).scale_real(1.0 / dd))
        - &ComplexMatrix::identity(d * d).scale_real(excess / (dd * dd));
    let projected = (&choi - &correction).hermitian_part();
    LinearMapMatrix::from_choi(*shape, &projected)
}

/// Outcome of a falsification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifySummary {
    pub requested: usize,
    /// Maps actually verified.
    pub tested: usize,
    /// Generated maps discarded because they classified as canonical.
    pub rejected_canonical: usize,
    /// Maps whose support defect stayed below tolerance on every trial.
    pub passes: usize,
    pub min_defect: Option<f64>,
    pub defects: Vec<f64>,
}

/// Parameters of [`falsify_random`] besides shape, count, seed and tolerance.
#[derive(Debug, Clone, Copy)]
pub struct FalsifyConfig {
    pub trials: usize,
    pub num_angles: usize,
    /// A generated map within this distance of a canonical form is discarded.
    pub canonical_tol: f64,
    /// Give up after this many consecutive canonical draws.
    pub max_rejections: usize,
}

impl Default for FalsifyConfig {
    fn default() -> Self {
        Self { trials: 10, num_angles: DEFAULT_NUM_ANGLES, canonical_tol: 1e-6, max_rejections: 100 }
    }
}

/// Generates `count` random non-canonical unital trace-preserving maps and
/// counts how many pass verification. Every such map should fail.
pub fn falsify_random(
    shape: &BipartiteShape,
    count: usize,
    seed: u64,
    tol: f64,
    config: &FalsifyConfig,
) -> Result<FalsifySummary> {
    let mut summary = FalsifySummary {
        requested: count,
        tested: 0,
        rejected_canonical: 0,
        passes: 0,
        min_defect: None,
        defects: Vec::new(),
    };
    if count == 0 {
        return Ok(summary);
    }
    let bank = TrialBank::new(*shape, config.trials, config.num_angles, seed)?;
    let mut rng = seeded_rng(seed ^ 0x9E37_79B9_7F4A_7C15);
    while summary.tested < count {
        let map = random_unital_trace_preserving(shape, &mut rng)?;
        let class = classify_preserver(&map, shape, config.canonical_tol)?;
        if class.verdict != ClassVerdict::NotAPreserver {
            summary.rejected_canonical += 1;
            if summary.rejected_canonical > config.max_rejections {
                return Err(Error::Numeric("random generator keeps producing canonical maps".into()));
            }
            continue;
        }
        let report = bank.verify(&map, tol)?;
        summary.tested += 1;
        if report.passed() {
            summary.passes += 1;
        }
        summary.min_defect = Some(summary.min_defect.map_or(report.max_support_defect, |m: f64| m.min(report.max_support_defect)));
        summary.defects.push(report.max_support_defect);
    }
    Ok(summary)
}

/// Convenience: canonical map for a random Haar unitary.
pub fn random_canonical<R: Rng + ?Sized>(
    varphi: VarphiTag,
    affine: bool,
    shape: &BipartiteShape,
    rng: &mut R,
) -> Result<(CanonicalFormSpec, LinearMapMatrix)> {
    let u = crate::matcore::random::random_haar_unitary(shape.dim(), rng);
    let spec = CanonicalFormSpec::new(varphi, u, affine, *shape)?;
    let map = crate::maps::build_canonical(&spec)?;
    Ok((spec, map))
}
