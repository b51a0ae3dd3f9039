mod common;

use nalgebra::DMatrix;
use opreg::hilbert::{apply_spectral_fn, empirical_cov, outer, schatten_norm, SchattenP};
use opreg::{HOperator, HVector};
use proptest::prelude::*;

fn vector(v: Vec<f64>) -> HVector {
    HVector::from_slice(&v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn outer_applies_as_rank_one(
        x in prop::collection::vec(-5.0..5.0f64, 1..6),
        y in prop::collection::vec(-5.0..5.0f64, 1..6),
        seed in any::<u64>(),
    ) {
        let mut rng = common::rng(seed);
        let v = common::gaussian(x.len(), 1, &mut rng).into_matrix();
        let v = HVector::new(v.column(0).into_owned()).unwrap();
        let (x, y) = (vector(x), vector(y));
        let lhs = outer(&y, &x).apply(&v).unwrap();
        let ip: f64 = x.as_slice().iter().zip(v.as_slice()).map(|(a, b)| a * b).sum();
        let scale = 1.0 + y.norm() * x.norm() * v.norm();
        for (l, yy) in lhs.as_slice().iter().zip(y.as_slice()) {
            prop_assert!((l - ip * yy).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn schatten_norms_nonincreasing_in_p(seed in any::<u64>(), r in 1usize..8, c in 1usize..8) {
        let a = common::gaussian(r, c, &mut common::rng(seed));
        let (inf, two, one) = (
            schatten_norm(&a, SchattenP::Inf),
            schatten_norm(&a, SchattenP::Two),
            schatten_norm(&a, SchattenP::One),
        );
        prop_assert!(inf <= two * (1.0 + 1e-12));
        prop_assert!(two <= one * (1.0 + 1e-12));
    }

    #[test]
    fn empirical_self_covariance_is_psd(seed in any::<u64>(), n in 1usize..30, d in 1usize..8) {
        let xs = common::gaussian(n, d, &mut common::rng(seed)).into_matrix();
        let c = empirical_cov(&xs, &xs).unwrap();
        for l in common::eigenvalues_desc(c.matrix()) {
            prop_assert!(l >= -1e-10);
        }
    }

    #[test]
    fn spectral_powers_compose(seed in any::<u64>(), d in 1usize..8, ai in 0usize..3, bi in 0usize..3) {
        let exps = [0.5, 1.0, 2.0];
        let (a, b) = (exps[ai], exps[bi]);
        let mut rng = common::rng(seed);
        let c = common::psd(d, d, &mut rng);
        let pa = apply_spectral_fn(&c, |l| l.powf(a)).unwrap();
        let pb = apply_spectral_fn(&c, |l| l.powf(b)).unwrap();
        let twice = pa.compose(&pb).unwrap();
        let once = apply_spectral_fn(&c, |l| l.powf(a + b)).unwrap();
        prop_assert!(twice.sub(&once).unwrap().hs_norm() <= 1e-9 * (1.0 + once.hs_norm()));
    }
}

#[test]
fn spectral_fn_matches_independent_eigensolver() {
    let mut rng = common::rng(3);
    for d in 1..8 {
        let c = common::psd(d, d, &mut rng);
        let ours = apply_spectral_fn(&c, |l| (1.0 + l).ln()).unwrap();
        let theirs = common::spectral(c.matrix(), |l| (1.0 + l.max(0.0)).ln());
        assert!((ours.matrix() - theirs).norm() < 1e-12);
    }
}

#[test]
fn hs_inner_is_entrywise_dot() {
    let mut rng = common::rng(5);
    let a = common::gaussian(3, 2, &mut rng);
    let b = common::gaussian(3, 2, &mut rng);
    let direct: f64 = a.matrix().iter().zip(b.matrix().iter()).map(|(x, y)| x * y).sum();
    assert!((opreg::hilbert::hs_inner(&a, &b).unwrap() - direct).abs() < 1e-14);
    let m = HOperator::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0])).unwrap();
    assert!((m.hs_norm() - 30f64.sqrt()).abs() < 1e-14);
}
