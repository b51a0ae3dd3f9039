mod common;

use opreg::hilbert::{empirical_cov, DEFAULT_RANK_TOL};
use opreg::precompose::source_condition_value;
use opreg::synthesize::{
    make_covariance, make_source_target, psi1_estimate_scalars, psi2_estimate, psi2_estimate_scalars, rng_for,
    sample_linear_model, sample_misspecified, Decay, GaussianFactor, MisspecifiedSpec, ModelOracle, SourceSpec,
};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn source_target_round_trip() {
    let c = make_covariance(15, Decay::Polynomial { rate: 1.5 }, 2.0).unwrap();
    for nu in [0.5, 1.0, 2.0] {
        for seed in 0..20 {
            let spec = SourceSpec { nu, r: 0.5 + seed as f64 * 0.1, seed };
            let theta = make_source_target(&c, &spec, 3).unwrap();
            let c_yx = theta.compose(&c).unwrap();
            let value = source_condition_value(&c, &c_yx, nu, DEFAULT_RANK_TOL).unwrap();
            let r2 = spec.r * spec.r;
            assert!((value - r2).abs() <= 1e-6 * r2, "nu={nu} seed={seed}: {value} vs {r2}");
        }
    }
}

#[test]
fn exogeneity_cross_covariance_decays_at_root_n() {
    let c = make_covariance(6, Decay::Polynomial { rate: 1.0 }, 1.0).unwrap();
    let theta = common::gaussian(3, 6, &mut common::rng(1));
    let model = ModelOracle::linear_isotropic(c, theta.clone(), 1.0).unwrap();
    let ns = [1_000usize, 10_000, 100_000];
    let mut logs = Vec::new();
    for &n in &ns {
        let mut norms: Vec<f64> = (0..7)
            .map(|seed| {
                let data = sample_linear_model(&model, n, 100 * n as u64 + seed).unwrap();
                let resid = data.ys() - data.xs() * theta.matrix().transpose();
                empirical_cov(data.xs(), &resid).unwrap().hs_norm()
            })
            .collect();
        logs.push(common::median(&mut norms).ln());
    }
    let x: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let slope = common::slope(&x, &logs);
    assert!((slope + 0.5).abs() <= 0.15, "slope {slope}");
}

#[test]
fn tensor_of_sub_gaussians_is_sub_exponential() {
    for seed in 0..5 {
        let c = make_covariance(5, Decay::Polynomial { rate: 1.0 }, 1.0).unwrap();
        let theta = common::gaussian(3, 5, &mut common::rng(seed));
        let model = ModelOracle::linear_isotropic(c, theta, 0.5).unwrap();
        let data = sample_linear_model(&model, 50_000, seed).unwrap();
        let products: Vec<f64> = data
            .xs()
            .row_iter()
            .zip(data.ys().row_iter())
            .map(|(x, y)| x.norm() * y.norm())
            .collect();
        let psi1 = psi1_estimate_scalars(&products, 32).unwrap();
        let bound = 2.0 * psi2_estimate(data.xs(), 32).unwrap() * psi2_estimate(data.ys(), 32).unwrap();
        assert!(psi1 <= bound * 1.1, "psi1 {psi1} bound {bound}");
    }
}

#[test]
fn psi2_of_standard_gaussian_matches_moments() {
    let mut rng = rng_for(4);
    let draws: Vec<f64> = (0..1_000_000).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    for p_max in [2usize, 8, 32] {
        let analytic = (1..=p_max as u32)
            .map(|p| common::gaussian_abs_moment(p).powf(1.0 / p as f64) / (p as f64).sqrt())
            .fold(0.0, f64::max);
        let est = psi2_estimate_scalars(&draws, p_max).unwrap();
        assert!((est - analytic).abs() <= 0.25 * analytic, "p_max {p_max}: {est} vs {analytic}");
    }
}

#[test]
fn misspecification_error_matches_monte_carlo() {
    let c = make_covariance(4, Decay::Polynomial { rate: 1.0 }, 1.0).unwrap();
    let spec = MisspecifiedSpec::random(c.clone(), 3, 1.3, 0.0, 17).unwrap();
    let (_, oracle) = sample_misspecified(&spec, 1, 0).unwrap();
    let n = 1_000_000;
    let xs = GaussianFactor::new(&c).unwrap().sample(n, &mut rng_for(23));
    let gap = oracle.conditional_mean_rows(&xs).unwrap() - &xs * spec.theta0.matrix().transpose();
    let mc = (gap.norm_squared() / n as f64).sqrt();
    let closed = oracle.misspecification_error().unwrap();
    assert!((mc - closed).abs() <= 0.02 * closed, "mc {mc} closed {closed}");

    // the quadratic part is uncorrelated with X, so C_YX = θ0 C_XX
    let cross = empirical_cov(&xs, &gap).unwrap();
    assert!(cross.hs_norm() < 0.01 * closed);
}

#[test]
fn misspecified_sample_cross_covariance_is_linear_part() {
    let c = make_covariance(3, Decay::Exponential { rate: 0.4 }, 1.0).unwrap();
    let spec = MisspecifiedSpec::random(c.clone(), 2, 0.7, 0.2, 3).unwrap();
    let (data, oracle) = sample_misspecified(&spec, 400_000, 8).unwrap();
    let target = oracle.c_yx().unwrap();
    let rel = data.cov_yx().sub(&target).unwrap().hs_norm() / target.hs_norm();
    assert!(rel < 0.02, "relative error {rel}");
}
