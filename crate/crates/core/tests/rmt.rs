use std::collections::BTreeMap;

use ncgenus::corpus;
use ncgenus::exec::Exec;
use ncgenus::genus::expected_trace_poly;
use ncgenus::ncpoly::{parse_word, BasisSymbol};
use ncgenus::rmt::{eval_poly_float, mc_batch_with, mc_expected_trace, pairwise_sum, sample_gue, FloatMatrix};
use ncgenus::scalars::QMatrix;
use ncgenus::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

fn random_float(n: usize, seed: u64) -> FloatMatrix {
    let mut rng = corpus::rng(seed);
    let rows: Vec<Vec<Complex64>> =
        (0..n).map(|_| (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()).collect();
    FloatMatrix::from_rows(&rows).unwrap()
}

fn naive_mul(a: &FloatMatrix, b: &FloatMatrix) -> FloatMatrix {
    let n = a.dim();
    let rows: Vec<Vec<Complex64>> =
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a.get(i, k) * b.get(k, j)).sum()).collect()).collect();
    FloatMatrix::from_rows(&rows).unwrap()
}

proptest! {
    #[test]
    fn product_matches_the_definition(n in 1usize..12, s in any::<u64>()) {
        let (a, b) = (random_float(n, s), random_float(n, s ^ 1));
        prop_assert!(a.mul(&b).max_abs_diff(&naive_mul(&a, &b)) < 1e-12);
        let t = a.trace_of_product(&b) - a.mul(&b).normalized_trace();
        prop_assert!(t.norm() < 1e-12);
    }

    #[test]
    fn summation_is_schedule_free(xs in prop::collection::vec(-1e3f64..1e3, 0..200)) {
        let zs: Vec<Complex64> = xs.iter().map(|&x| Complex64::new(x, -x)).collect();
        let naive: Complex64 = zs.iter().sum();
        prop_assert!((pairwise_sum(&zs) - naive).norm() < 1e-8);
    }
}

#[test]
fn gue_variance_profile() {
    let n = 6;
    let mut rng = corpus::rng(3);
    let (mut diag, mut off, mut off_re_im) = (0.0, 0.0, 0.0);
    let draws = 4000;
    for _ in 0..draws {
        let x = sample_gue(n, &mut rng).unwrap();
        assert_eq!(x.hermitian_defect(), 0.0);
        diag += x.get(0, 0).re.powi(2);
        off += x.get(0, 1).norm_sqr();
        off_re_im += x.get(0, 1).re * x.get(0, 1).im;
    }
    let k = draws as f64;
    // E X_jj² = E|X_ij|² = 1/N
    assert!((diag / k * n as f64 - 1.0).abs() < 0.1);
    assert!((off / k * n as f64 - 1.0).abs() < 0.1);
    assert!((off_re_im / k * n as f64).abs() < 0.05);
}

#[test]
fn concrete_letters_evaluate_exactly() {
    let a = QMatrix::parse("[1,2;0,-1/2]").unwrap();
    let b = QMatrix::parse("[0,1;1,1/3]").unwrap();
    let f = parse_word("[1,2;0,-1/2] g0 [0,1;1,1/3] g1").unwrap();
    let x = random_float(2, 4);
    let h = &x + &x.adjoint();
    let id = FloatMatrix::identity(2);
    let assignment: BTreeMap<BasisSymbol, FloatMatrix> = [(BasisSymbol::gue(0), h.clone()), (BasisSymbol::gue(1), id)].into();
    let got = eval_poly_float(&f, &assignment).unwrap();
    let want = FloatMatrix::from_exact(&a).mul(&h).mul(&FloatMatrix::from_exact(&b));
    assert!(got.max_abs_diff(&want) < 1e-12);
    let pure = parse_word("[1,2;0,-1/2] [0,1;1,1/3]").unwrap();
    assert!(eval_poly_float(&pure, &BTreeMap::new()).unwrap().max_abs_diff(&FloatMatrix::from_exact(&a.mul(&b))) < 1e-12);
}

#[test]
fn monte_carlo_tracks_exact_moments_with_matrix_letters() {
    let n = 3;
    let words = [
        "[1,2,0;0,1,0;1,0,1] g0 [0,1,0;1,0,0;0,0,2] g0",
        "g0 [1,1,0;0,1,1;1,0,1] g0 g1 [2,0,0;0,1,0;0,0,-1] g1",
        "g0 g1 g0 g1",
        "g0 g0 g1 g1 g0 g0",
    ];
    let fs: Vec<_> = words.iter().map(|w| parse_word(w).unwrap()).collect();
    let est = mc_batch_with(&fs, n, 40_000, 17, Exec::Parallel).unwrap();
    for ((w, f), e) in words.iter().zip(&fs).zip(&est) {
        let exact = expected_trace_poly(f).unwrap().eval_f64(1.0 / (n * n) as f64).unwrap();
        let z = e.z_score(exact.0);
        assert!(z.abs() < 4.0, "{w}: mean {} vs exact {}, z = {z}", e.mean, exact.0);
        assert!((e.mean.im - exact.1).abs() < 6.0 * e.stderr, "{w}: imaginary part {}", e.mean.im);
    }
}

#[test]
fn sampling_is_seeded() {
    let f = parse_word("g0^4").unwrap();
    let a = mc_batch_with(std::slice::from_ref(&f), 5, 300, 8, Exec::Parallel).unwrap();
    assert_eq!(a, mc_batch_with(std::slice::from_ref(&f), 5, 300, 8, Exec::Sequential).unwrap());
    assert_ne!(a, mc_batch_with(std::slice::from_ref(&f), 5, 300, 9, Exec::Sequential).unwrap());
}

#[test]
fn rejects_what_has_no_matrix_model() {
    assert!(matches!(mc_expected_trace(&parse_word("g0 s0 g0 s0").unwrap(), 4, 10, 0), Err(Error::SemicircularInNumeric(_))));
    assert!(mc_expected_trace(&parse_word("Z1 g0 g0").unwrap(), 4, 10, 0).is_err());
    assert!(mc_expected_trace(&parse_word("[1,0;0,2] g0 g0").unwrap(), 3, 10, 0).is_err());
}
