//! Independent oracles for computed range values. None of these go through
//! the Hermitian eigensolver used by the library.

use num_complex::Complex64;

use kpreserve::krange::{
    angle_grid, boundary_point, k_numerical_radius, krange_hermitian, krange_profile, ranges_equal, rotated_re,
    sample_points, support_grid, support_value,
};
use kpreserve::maps::{build_canonical, CanonicalFormSpec, LinearMapMatrix, VarphiTag};
use kpreserve::matcore::random::{random_complex, random_haar_unitary, seeded_rng};
use kpreserve::matcore::{eigenvalues_hermitian, BipartiteShape, ComplexMatrix};
use kpreserve::papersuite::example1_matrices;

fn diag_example() -> ComplexMatrix {
    ComplexMatrix::diag_real(&[3.0, 1.0, 0.0, -1.0])
}

/// Every coordinate isometry `[e_i, e_j]`: its value is attained exactly.
fn coordinate_values(d: &[f64], k: usize) -> Vec<f64> {
    fn rec(d: &[f64], k: usize, start: usize, acc: f64, out: &mut Vec<f64>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..d.len() {
            rec(d, k - 1, i + 1, acc + d[i], out);
        }
    }
    let mut out = Vec::new();
    rec(d, k, 0, 0.0, &mut out);
    out.into_iter().map(|s| s / k as f64).collect()
}

/// Gram-Schmidt on column vectors.
fn orthonormalize(cols: &mut [Vec<Complex64>]) {
    for i in 0..cols.len() {
        for j in 0..i {
            let proj: Complex64 = cols[j].iter().zip(&cols[i]).map(|(a, b)| a.conj() * b).sum();
            let prev = cols[j].clone();
            for (x, p) in cols[i].iter_mut().zip(prev) {
                *x -= proj * p;
            }
        }
        let norm = cols[i].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[i].iter_mut() {
            *x /= norm;
        }
    }
}

/// Largest `tr(X* Diag(d) X)/2` over 4×2 isometries, by orthogonal iteration
/// with `Diag(d) + shift·I` from a random start.
fn refine(d: &[f64], shift: f64, rng: &mut kpreserve::matcore::random::SeededRng) -> f64 {
    let mut cols = kpreserve::matcore::random::random_isometry(d.len(), 2, rng);
    for _ in 0..200 {
        for c in cols.iter_mut() {
            for (x, w) in c.iter_mut().zip(d) {
                *x *= w + shift;
            }
        }
        orthonormalize(&mut cols);
    }
    let value: f64 = cols.iter().map(|c| c.iter().zip(d).map(|(x, w)| w * x.norm_sqr()).sum::<f64>()).sum();
    value / 2.0
}

#[test]
fn diagonal_interval_by_enumeration_and_sampling() {
    let values = coordinate_values(&[3.0, 1.0, 0.0, -1.0], 2);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!((lo, hi), (-0.5, 2.0));

    let iv = krange_hermitian(&diag_example(), 2).unwrap();
    assert!((iv.lo - lo).abs() < 1e-12 && (iv.hi - hi).abs() < 1e-12);

    // 10^5 random isometries never leave the interval
    let samples = sample_points(&diag_example(), 2, 100_000, 17).unwrap();
    let (mut smin, mut smax) = (f64::INFINITY, f64::NEG_INFINITY);
    for z in &samples {
        assert!(z.im.abs() < 1e-12);
        smin = smin.min(z.re);
        smax = smax.max(z.re);
    }
    assert!(smin >= lo - 1e-9 && smax <= hi + 1e-9);
    // raw samples only approach the endpoints; refining random starts by
    // orthogonal iteration attains them
    assert!(smax > hi - 0.2 && smin < lo + 0.2, "{smin} {smax}");
    let mut rng = seeded_rng(18);
    let d = [3.0, 1.0, 0.0, -1.0];
    let top = refine(&d, 4.0, &mut rng);
    let bottom = refine(&d.map(|x| -x), 4.0, &mut rng);
    assert!((top - 2.0).abs() < 1e-3, "{top}");
    assert!((-bottom - (-0.5)).abs() < 1e-3, "{bottom}");

    assert!((k_numerical_radius(&diag_example(), 2, 360).unwrap() - 2.0).abs() < 1e-12);
}

/// Eigenvalues of a 2×2 matrix by the quadratic formula.
fn eig2(a: &ComplexMatrix) -> (Complex64, Complex64) {
    let tr = a[(0, 0)] + a[(1, 1)];
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let disc = (tr * tr - det * 4.0).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

/// Support function of the elliptical numerical range of a 2×2 matrix: foci
/// at the eigenvalues, minor axis `sqrt(tr(A*A) − |λ1|² − |λ2|²)`.
fn ellipse_support(a: &ComplexMatrix, theta: f64) -> f64 {
    let (l1, l2) = eig2(a);
    let frob: f64 = (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| a[(i, j)].norm_sqr()).sum();
    let b = 0.5 * (frob - l1.norm_sqr() - l2.norm_sqr()).max(0.0).sqrt();
    let f = 0.5 * (l1 - l2).norm();
    let major = (b * b + f * f).sqrt();
    let phi = (l1 - l2).arg();
    let center = (l1 + l2) / 2.0;
    let t = theta - phi;
    rotated_re(center, theta) + (major * major * t.cos().powi(2) + b * b * t.sin().powi(2)).sqrt()
}

#[test]
fn two_by_two_support_matches_ellipse() {
    let mut rng = seeded_rng(41);
    for _ in 0..50 {
        let a = random_complex(2, &mut rng);
        let grid = angle_grid(48);
        let h = support_grid(&a, 1, 48).unwrap();
        for (th, hv) in grid.iter().zip(&h) {
            let e = ellipse_support(&a, *th);
            assert!((hv - e).abs() < 1e-10 * (1.0 + e.abs()), "{hv} vs {e}");
        }
    }
}

#[test]
fn boundary_points_lie_on_supporting_lines() {
    let mut rng = seeded_rng(42);
    let a = random_complex(5, &mut rng);
    let samples = sample_points(&a, 2, 2000, 43).unwrap();
    for th in angle_grid(24) {
        let b = boundary_point(&a, 2, th).unwrap();
        let h = support_value(&a, 2, th).unwrap();
        assert!((rotated_re(b, th) - h).abs() < 1e-9 * (1.0 + h.abs()));
        // no sample lies beyond the supporting line
        assert!(samples.iter().all(|z| rotated_re(*z, th) <= h + 1e-9));
    }
}

#[test]
fn constructed_spectrum_is_recovered() {
    let mut rng = seeded_rng(44);
    let u = random_haar_unitary(3, &mut rng);
    let h = ComplexMatrix::diag_real(&[2.0, 2.0, -1.0]).conjugate_by(&u).hermitian_part();
    let ev = eigenvalues_hermitian(&h).unwrap();
    for (x, y) in ev.iter().zip([2.0, 2.0, -1.0]) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn example_profiles_differ_at_zero_for_k_two() {
    let (a, b) = example1_matrices(3, 3).unwrap();
    let ab = a.kron(&b);
    let abt = a.kron(&b.transpose());
    // sums of the two largest listed eigenvalues, halved
    let expected = (((41.0_f64 / 2.0).sqrt() + 1.5) - (4.5 + (9.0_f64 / 2.0).sqrt())).abs() / 2.0;
    assert!(expected > 0.1);
    let h1 = support_value(&ab, 2, 0.0).unwrap();
    let h2 = support_value(&abt, 2, 0.0).unwrap();
    assert!(((h1 - h2).abs() - expected).abs() < 1e-10);
    for k in 1..9 {
        let p1 = krange_profile(&ab, k, 360).unwrap();
        let p2 = krange_profile(&abt, k, 360).unwrap();
        assert!(!ranges_equal(&p1, &p2, 1e-6).unwrap(), "k = {k}");
        assert!(ranges_equal(&p1, &p1, 1e-12).unwrap());
    }
}

#[test]
fn partial_transpose_form_moves_example_spectrum() {
    let shape = BipartiteShape::new(3, 3, 2).unwrap();
    let u = random_haar_unitary(9, &mut seeded_rng(45));
    let map = build_canonical(&CanonicalFormSpec::new(VarphiTag::PartialRight, u, false, shape).unwrap()).unwrap();
    let (a, b) = example1_matrices(3, 3).unwrap();
    let image = map.apply(&a.kron(&b)).unwrap();
    let ev = eigenvalues_hermitian(&image.hermitian_part()).unwrap();
    let r = (9.0_f64 / 2.0).sqrt();
    let expected = [4.5, r, 0.5, 0.0, 0.0, 0.0, -0.5, -r, -4.5];
    for (x, y) in ev.iter().zip(expected) {
        assert!((x - y).abs() < 1e-10, "{ev:?}");
    }
}

#[test]
fn affine_form_fails_away_from_half() {
    // built by hand, since the public constructor refuses mn ≠ 2k
    let shape = BipartiteShape::new(2, 2, 1).unwrap();
    let k = shape.k() as f64;
    let map = LinearMapMatrix::from_fn(shape, |x| {
        Ok(&ComplexMatrix::identity(4).scale(x.trace() / k) - x)
    })
    .unwrap();
    let e = ComplexMatrix::unit(2, 0, 0);
    let x = e.kron(&e);
    let before = krange_hermitian(&x, 1).unwrap();
    let after = krange_hermitian(&map.apply(&x).unwrap().hermitian_part(), 1).unwrap();
    assert_eq!((before.lo, before.hi), (0.0, 1.0));
    // (tr X/k)I − X = Diag(0,1,1,1): the unit witness alone does not separate
    // at k = 1, the random trials do
    assert!((after.lo - 0.0).abs() < 1e-12 && (after.hi - 1.0).abs() < 1e-12);
    let k2 = BipartiteShape::new(2, 2, 3).unwrap();
    let map3 = LinearMapMatrix::from_fn(k2, |x| Ok(&ComplexMatrix::identity(4).scale(x.trace() / 3.0) - x)).unwrap();
    let report = kpreserve::classify::verify_preserver(&map3, &k2, 5, 72, 1e-8, 1).unwrap();
    assert!(!report.passed());
    let report1 = kpreserve::classify::verify_preserver(&map, &shape, 5, 72, 1e-8, 1).unwrap();
    assert!(!report1.passed());
}
