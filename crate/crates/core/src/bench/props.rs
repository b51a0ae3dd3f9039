//! Executable property suite covering the invariants of every module.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::config::PropsConfig;
use super::output::CsvOut;
use crate::applications::arh::{arh_fit_with, lagged_pairs, simulate_arh, BlockAssembly};
use crate::applications::cme::{cme_fit, FeatureLift};
use crate::error::Result;
use crate::estimate::{fit, SampleSet};
use crate::hilbert::{eig_sym, empirical_cov, schatten_norm, HOperator, SchattenP, DEFAULT_RANK_TOL};
use crate::precompose::{precompose_adjoint_check, precompose_oracle_capped, solve_pseudo, source_condition_value, vec_op};
use crate::regularize::{
    default_alpha_grid, default_lambda_grid, qualification_check, regularized_inverse, verify_strategy, RegStrategy,
};
use crate::synthesize::{derive_seed, make_source_target, random_operator, random_psd, rng_for, SourceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PropertyStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyResult {
    pub name: &'static str,
    pub status: PropertyStatus,
    pub seed: u64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertyReport {
    pub config_hash: String,
    pub seed: u64,
    pub results: Vec<PropertyResult>,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != PropertyStatus::Fail)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

type Property = fn(&PropsConfig, u64) -> Result<Outcome>;

const PROPERTIES: [(&str, Property); 16] = [
    ("hilbert.schatten_ordering", schatten_ordering),
    ("hilbert.empirical_cov_psd", empirical_cov_psd),
    ("hilbert.eig_reconstruction", eig_reconstruction),
    ("precompose.adjoint", adjoint),
    ("precompose.spectrum", spectrum),
    ("precompose.norm_identity", norm_identity),
    ("precompose.functional_calculus", functional_calculus),
    ("precompose.pseudo_minimal_norm", pseudo_minimal_norm),
    ("regularize.tikhonov_constants", tikhonov_constants),
    ("regularize.truncation_constants", truncation_constants),
    ("regularize.landweber_constants", landweber_constants),
    ("regularize.qualification", qualification),
    ("synthesize.source_round_trip", source_round_trip),
    ("estimate.noiseless_recovery", noiseless_recovery),
    ("applications.kernel_trick", kernel_trick),
    ("applications.arh_order_one", arh_order_one),
];

pub fn property_names() -> Vec<&'static str> {
    PROPERTIES.iter().map(|(n, _)| *n).collect()
}

/// Runs every property with a seed derived from `seed` and its index.
/// Errors inside a property count as failures.
pub fn run_property_suite(opts: &PropsConfig, seed: u64, config_hash: &str) -> PropertyReport {
    let results = PROPERTIES
        .iter()
        .enumerate()
        .map(|(i, (name, prop))| {
            let seed = derive_seed(seed, i as u64);
            let (status, detail) = match prop(opts, seed) {
                Ok(Outcome::Pass(d)) => (PropertyStatus::Pass, d),
                Ok(Outcome::Fail(d)) => (PropertyStatus::Fail, d),
                Ok(Outcome::Skip(d)) => (PropertyStatus::Skip, d),
                Err(e) => (PropertyStatus::Fail, format!("error: {e}")),
            };
            PropertyResult {
                name,
                status,
                seed,
                detail,
            }
        })
        .collect();
    PropertyReport {
        config_hash: config_hash.to_string(),
        seed,
        results,
    }
}

pub fn write_property_outputs(report: &PropertyReport, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join("props.csv");
    let mut csv = CsvOut::create(&csv_path, &report.config_hash, report.seed, &["property", "status", "seed", "detail"])?;
    for r in &report.results {
        let status = serde_json::to_value(r.status)?.as_str().unwrap_or_default().to_string();
        csv.row([r.name.to_string(), status, r.seed.to_string(), r.detail.clone()])?;
    }
    csv.finish()?;
    let json_path = dir.join("props.json");
    std::fs::write(&json_path, serde_json::to_string_pretty(report)? + "\n")?;
    Ok(vec![csv_path, json_path])
}

fn instance_dims(rng: &mut impl Rng, opts: &PropsConfig) -> (usize, usize) {
    (rng.random_range(1..=opts.oracle_d_x.max(1)), rng.random_range(1..=opts.oracle_d_y.max(1)))
}

fn oracle_guard(opts: &PropsConfig) -> Option<Outcome> {
    let dim = opts.oracle_d_x * opts.oracle_d_y;
    (dim > opts.oracle_cap).then(|| Outcome::Skip(format!("oracle dimension {dim} exceeds cap {}", opts.oracle_cap)))
}

fn schatten_ordering(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    for _ in 0..opts.instances {
        let a = random_operator(rng.random_range(1..=8), rng.random_range(1..=8), &mut rng);
        let (inf, two, one) = (
            schatten_norm(&a, SchattenP::Inf),
            schatten_norm(&a, SchattenP::Two),
            schatten_norm(&a, SchattenP::One),
        );
        if !(inf <= two * (1.0 + 1e-12) && two <= one * (1.0 + 1e-12)) {
            return Ok(Outcome::Fail(format!("norms {inf} {two} {one} out of order")));
        }
    }
    Ok(Outcome::Pass(format!("{} instances", opts.instances)))
}

fn empirical_cov_psd(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..opts.instances {
        let xs = random_operator(rng.random_range(1..=20), rng.random_range(1..=8), &mut rng).into_matrix();
        let c = empirical_cov(&xs, &xs)?;
        let eig = eig_sym(&c)?;
        worst = worst.min(eig.min_eigenvalue() / (1.0 + eig.max_eigenvalue()));
    }
    Ok(verdict(worst >= -1e-12, format!("smallest relative eigenvalue {worst:.3e}")))
}

fn eig_reconstruction(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for _ in 0..opts.instances {
        let d = rng.random_range(1..=10);
        let c = random_psd(d, rng.random_range(1..=d), &mut rng);
        let err = eig_sym(&c)?.reconstruct().sub(&c)?.hs_norm() / (1.0 + c.hs_norm());
        worst = worst.max(err);
    }
    Ok(verdict(worst <= 1e-12, format!("max relative residual {worst:.3e}")))
}

fn adjoint(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for _ in 0..opts.instances {
        let (dx, dy) = instance_dims(&mut rng, opts);
        let c = random_psd(dx, dx, &mut rng);
        let t1 = random_operator(dy, dx, &mut rng);
        let t2 = random_operator(dy, dx, &mut rng);
        let (l, r) = precompose_adjoint_check(&c, &t1, &t2)?;
        worst = worst.max((l - r).abs() / (1.0 + l.abs()));
    }
    Ok(verdict(worst <= 1e-12, format!("max relative gap {worst:.3e}")))
}

fn spectrum(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    if let Some(skip) = oracle_guard(opts) {
        return Ok(skip);
    }
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for _ in 0..opts.instances {
        let (dx, dy) = instance_dims(&mut rng, opts);
        let c = random_psd(dx, rng.random_range(1..=dx), &mut rng);
        let rep = precompose_oracle_capped(&c, dy, opts.oracle_cap)?;
        let oracle_eigs = eig_sym(rep.oracle().expect("materialised"))?;
        let base = eig_sym(&c)?;
        for (k, &l) in oracle_eigs.eigenvalues().iter().enumerate() {
            worst = worst.max((l - base.eigenvalues()[k / dy]).abs());
        }
    }
    Ok(verdict(worst <= 1e-10, format!("max eigenvalue deviation {worst:.3e}")))
}

fn norm_identity(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    if let Some(skip) = oracle_guard(opts) {
        return Ok(skip);
    }
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for _ in 0..opts.instances {
        let (dx, dy) = instance_dims(&mut rng, opts);
        let c = random_psd(dx, dx, &mut rng);
        let rep = precompose_oracle_capped(&c, dy, opts.oracle_cap)?;
        worst = worst.max((rep.oracle().expect("materialised").op_norm() - c.op_norm()).abs());
    }
    Ok(verdict(worst <= 1e-10, format!("max norm gap {worst:.3e}")))
}

fn functional_calculus(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    if let Some(skip) = oracle_guard(opts) {
        return Ok(skip);
    }
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for _ in 0..opts.instances {
        let (dx, dy) = instance_dims(&mut rng, opts);
        let c = random_psd(dx, rng.random_range(1..=dx), &mut rng);
        let s = RegStrategy::tikhonov();
        let lhs = regularized_inverse(&s, 0.1, precompose_oracle_capped(&c, dy, opts.oracle_cap)?.oracle().expect("materialised"))?;
        let rhs = precompose_oracle_capped(&regularized_inverse(&s, 0.1, &c)?, dy, opts.oracle_cap)?;
        let gap = lhs.sub(rhs.oracle().expect("materialised"))?.hs_norm() / (1.0 + c.op_norm());
        worst = worst.max(gap);
    }
    Ok(verdict(worst <= 1e-9, format!("max relative HS gap {worst:.3e}")))
}

fn pseudo_minimal_norm(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    for _ in 0..opts.instances {
        let dx = rng.random_range(2..=8);
        let dy = rng.random_range(1..=4);
        let c = random_psd(dx, rng.random_range(1..dx), &mut rng);
        let theta = random_operator(dy, dx, &mut rng);
        let c_yx = theta.compose(&c)?;
        let sol = solve_pseudo(&c, &c_yx, DEFAULT_RANK_TOL)?;
        let residual = sol.compose(&c)?.sub(&c_yx)?.hs_norm();
        if residual > 1e-8 * (1.0 + c_yx.hs_norm()) {
            return Ok(Outcome::Fail(format!("residual {residual:.3e}")));
        }
        // any other solution differs by a kernel component and is longer
        let eig = eig_sym(&c)?;
        let k = eig.eigenvalues().len() - 1;
        let kernel_dir = eig.eigenvectors().column(k).into_owned();
        let bump = DMatrix::from_fn(dy, 1, |_, _| rng.random_range(-1.0..1.0)) * kernel_dir.transpose();
        let other = sol.add(&HOperator::new(bump)?)?;
        if vec_op(&other).norm() < vec_op(&sol).norm() - 1e-10 {
            return Ok(Outcome::Fail("perturbed solution is shorter".into()));
        }
    }
    Ok(Outcome::Pass(format!("{} rank-deficient instances", opts.instances)))
}

fn check_constants(s: &RegStrategy) -> Result<Outcome> {
    let c = verify_strategy(s, &default_alpha_grid(), &default_lambda_grid())?;
    Ok(verdict(
        c.passed(),
        format!(
            "sup|λg|={:.6} (D={}), sup|r|={:.6} (γ0={}), sup α|g|={:.6} (B={})",
            c.sup_lambda_g, s.d, c.sup_residual, s.gamma0, c.sup_alpha_g, s.b
        ),
    ))
}

fn tikhonov_constants(opts: &PropsConfig, _seed: u64) -> Result<Outcome> {
    let s = RegStrategy::tikhonov();
    let s = match opts.tikhonov_d {
        Some(d) => s.with_constants(d, s.gamma0, s.b)?,
        None => s,
    };
    check_constants(&s)
}

fn truncation_constants(_opts: &PropsConfig, _seed: u64) -> Result<Outcome> {
    check_constants(&RegStrategy::truncation())
}

fn landweber_constants(_opts: &PropsConfig, _seed: u64) -> Result<Outcome> {
    check_constants(&RegStrategy::landweber(Some(0.5)))
}

fn qualification(_opts: &PropsConfig, _seed: u64) -> Result<Outcome> {
    let (alphas, lambdas) = (default_alpha_grid(), default_lambda_grid());
    let t = qualification_check(&RegStrategy::tikhonov(), 1.0, &alphas, &lambdas)?;
    let c = qualification_check(&RegStrategy::truncation(), 2.0, &alphas, &lambdas)?;
    let l = qualification_check(&RegStrategy::landweber(Some(0.5)), 2.0, &alphas, &lambdas)?;
    Ok(verdict(
        t.passed && c.passed && l.passed,
        format!(
            "tikhonov q=1 sup {:.4}, truncation q=2 sup {:.4}, landweber q=2 sup {:.4}",
            t.sup_ratio, c.sup_ratio, l.sup_ratio
        ),
    ))
}

fn source_round_trip(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for i in 0..opts.instances {
        let d = rng.random_range(2..=8);
        let lambdas: Vec<f64> = (0..d).map(|_| rng.random_range(0.2..1.5)).collect();
        let c = HOperator::from_diagonal(&lambdas)?;
        let spec = SourceSpec {
            nu: [0.5, 1.0, 2.0][i % 3],
            r: rng.random_range(0.5..3.0),
            seed: derive_seed(seed, i as u64),
        };
        let theta = make_source_target(&c, &spec, rng.random_range(1..=4))?;
        let value = source_condition_value(&c, &theta.compose(&c)?, spec.nu, DEFAULT_RANK_TOL)?;
        worst = worst.max((value - spec.r * spec.r).abs() / (spec.r * spec.r));
    }
    Ok(verdict(worst <= 1e-6, format!("max relative error {worst:.3e}")))
}

fn noiseless_recovery(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    let mut worst = 0.0_f64;
    for _ in 0..opts.instances {
        let dx = rng.random_range(1..=6);
        let dy = rng.random_range(1..=3);
        let xs = random_operator(4 * dx + 10, dx, &mut rng).into_matrix();
        let theta = random_operator(dy, dx, &mut rng);
        let ys = &xs * theta.matrix().transpose();
        let est = fit(&SampleSet::new(xs, ys)?, &RegStrategy::truncation(), 1e-8)?;
        worst = worst.max(est.theta_hat.sub(&theta)?.hs_norm() / (1.0 + theta.hs_norm()));
    }
    Ok(verdict(worst <= 1e-8, format!("max relative error {worst:.3e}")))
}

fn kernel_trick(opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let mut rng = rng_for(seed);
    for _ in 0..opts.instances {
        let dx = rng.random_range(1..=6);
        let xs = random_operator(30, dx, &mut rng).into_matrix();
        let ys = random_operator(30, 2, &mut rng).into_matrix();
        let s = RegStrategy::tikhonov();
        let lifted = cme_fit(&xs, &ys, &FeatureLift::identity(dx), &s, 0.05)?;
        let plain = fit(&SampleSet::new(xs, ys)?, &s, 0.05)?;
        if lifted.theta_hat != plain.theta_hat {
            return Ok(Outcome::Fail("identity lift differs from plain fit".into()));
        }
    }
    Ok(Outcome::Pass("bit-identical".into()))
}

fn arh_order_one(_opts: &PropsConfig, seed: u64) -> Result<Outcome> {
    let theta = HOperator::from_diagonal(&[0.5, -0.3, 0.2])?;
    let traj = simulate_arh(&[theta], 1.0, 400, 50, seed)?;
    let s = RegStrategy::tikhonov();
    let arh = arh_fit_with(&traj, 1, &s, 1e-3, BlockAssembly::LaggedWindow)?;
    let direct = fit(&lagged_pairs(&traj, 1)?, &s, 1e-3)?;
    let gap = arh.model.blocks[0].sub(&direct.theta_hat)?.hs_norm();
    Ok(verdict(gap <= 1e-12, format!("HS gap {gap:.3e}")))
}
