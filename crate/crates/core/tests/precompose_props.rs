mod common;

use nalgebra::DMatrix;
use opreg::hilbert::{apply_spectral_fn_with_cutoff, DEFAULT_RANK_TOL};
use opreg::precompose::{precompose_apply, precompose_oracle, solve_pseudo};
use opreg::regularize::{regularized_inverse, RegStrategy};
use opreg::HOperator;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oracle_spectrum_repeats_covariance_spectrum(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (dx, dy) = common::dims(&mut rng, 8, 5);
        let c = common::psd(dx, rng.random_range(1..=dx), &mut rng);
        let rep = precompose_oracle(&c, dy).unwrap();
        let oracle = common::eigenvalues_desc(rep.oracle().unwrap().matrix());
        let base = common::eigenvalues_desc(c.matrix());
        let repeated: Vec<f64> = base.iter().flat_map(|&l| std::iter::repeat_n(l, dy)).collect();
        for (a, b) in oracle.iter().zip(&repeated) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    #[test]
    fn oracle_matches_explicit_kronecker(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (dx, dy) = common::dims(&mut rng, 6, 4);
        let c = common::gaussian(dx, dx, &mut rng);
        let rep = precompose_oracle(&c, dy).unwrap();
        prop_assert_eq!(rep.oracle().unwrap().matrix(), &common::kronecker_oracle(c.matrix(), dy));
        let theta = common::gaussian(dy, dx, &mut rng);
        let via = rep.oracle().unwrap().matrix() * common::vec_cols(theta.matrix());
        let direct = common::vec_cols(precompose_apply(&c, &theta).unwrap().matrix());
        prop_assert!((via - direct).norm() <= 1e-12 * (1.0 + theta.hs_norm() * c.hs_norm()));
    }

    #[test]
    fn injective_iff_covariance_full_rank(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let (dx, dy) = common::dims(&mut rng, 7, 4);
        let rank = rng.random_range(1..=dx);
        let c = common::psd(dx, rank, &mut rng);
        let rep = precompose_oracle(&c, dy).unwrap();
        let c_rank = c.rank(DEFAULT_RANK_TOL);
        let o_rank = rep.oracle().unwrap().rank(DEFAULT_RANK_TOL);
        prop_assert_eq!(o_rank, dy * c_rank);
        prop_assert_eq!(o_rank == dx * dy, c_rank == dx);
    }

    #[test]
    fn functional_calculus_commutes(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = common::rng(seed);
        let (dx, dy) = common::dims(&mut rng, 6, 4);
        let c = common::psd(dx, rng.random_range(1..=dx), &mut rng);
        let oracle = precompose_oracle(&c, dy).unwrap();
        let oracle = oracle.oracle().unwrap();
        let alpha = 0.1;
        let (lhs, rhs) = match which {
            0 => {
                let s = RegStrategy::tikhonov();
                (regularized_inverse(&s, alpha, oracle).unwrap(), regularized_inverse(&s, alpha, &c).unwrap())
            }
            1 => {
                let f = |l: f64| l.max(0.0).powf(0.7);
                (
                    apply_spectral_fn_with_cutoff(oracle, f, 0.0).unwrap(),
                    apply_spectral_fn_with_cutoff(&c, f, 0.0).unwrap(),
                )
            }
            _ => {
                let s = RegStrategy::truncation();
                (regularized_inverse(&s, alpha, oracle).unwrap(), regularized_inverse(&s, alpha, &c).unwrap())
            }
        };
        let lifted = common::kronecker_oracle(rhs.matrix(), dy);
        prop_assert!((lhs.matrix() - lifted).norm() <= 1e-9 * (1.0 + c.op_norm()));
    }

    #[test]
    fn pseudo_solution_has_minimal_norm(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let dx = rng.random_range(2..=7);
        let dy = rng.random_range(1..=4);
        let c = common::psd(dx, rng.random_range(1..dx), &mut rng);
        let theta = common::gaussian(dy, dx, &mut rng);
        let sol = solve_pseudo(&c, &theta.compose(&c).unwrap(), DEFAULT_RANK_TOL).unwrap();
        // kernel projector of C from an independent eigensolver
        let e = nalgebra::SymmetricEigen::new(c.matrix().clone());
        let cut = 1e-9 * e.eigenvalues.max();
        let mut proj = DMatrix::zeros(dx, dx);
        for (j, &l) in e.eigenvalues.iter().enumerate() {
            if l <= cut {
                let v = e.eigenvectors.column(j);
                proj += &v * v.transpose();
            }
        }
        let base = sol.hs_norm();
        for _ in 0..100 {
            let kappa = common::gaussian(dy, dx, &mut rng).into_matrix() * &proj;
            prop_assert!((&kappa * c.matrix()).norm() <= 1e-8 * (1.0 + kappa.norm()));
            let other = HOperator::new(sol.matrix() + kappa).unwrap();
            prop_assert!(other.hs_norm() >= base - 1e-10);
        }
    }
}
