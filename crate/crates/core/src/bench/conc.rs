//! Monte Carlo coverage of the sub-Gaussian covariance concentration bound
//! `‖Ĉ_XX − C_XX‖_HS ≤ 24√2 e ‖X‖²_ψ2 √(log(1/δ)/n)`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::StudyConfig;
use super::output::{fmt_f64, svg_line_plot, CsvOut, Series};
use crate::error::{Error, Result};
use crate::hilbert::empirical_cov;
use crate::synthesize::{derive_seed, make_covariance, psi2_estimate, rng_for, GaussianFactor};

pub const CONC_HEADER: [&str; 4] = ["trial", "deviation", "bound", "covered"];

/// Stream reserved for the calibration sample.
const CALIBRATION_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationTrial {
    pub trial: usize,
    pub deviation: f64,
    pub covered: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentrationReport {
    pub config_hash: String,
    pub seed: u64,
    pub n: usize,
    pub delta: f64,
    pub trials: Vec<ConcentrationTrial>,
    pub bound: f64,
    pub coverage: f64,
    pub psi2_x: f64,
    pub p_max: usize,
    pub calibration_samples: usize,
}

impl ConcentrationReport {
    pub fn passed(&self) -> bool {
        self.coverage >= 1.0 - self.delta
    }
}

/// `24√2 e ψ² √(log(1/δ)/n)`.
pub fn concentration_bound(psi2: f64, n: usize, delta: f64) -> f64 {
    24.0 * std::f64::consts::SQRT_2 * std::f64::consts::E * psi2 * psi2 * ((1.0 / delta).ln() / n as f64).sqrt()
}

pub fn run_concentration_study(cfg: &StudyConfig, threads: usize) -> Result<ConcentrationReport> {
    cfg.validate()?;
    let n = cfg.sample_size;
    let log_inv_delta = (1.0 / cfg.delta).ln();
    if (n as f64) < log_inv_delta {
        return Err(Error::Precondition(format!(
            "sample size {n} is below log(1/delta) = {log_inv_delta:.3}"
        )));
    }
    let c_xx = make_covariance(cfg.d_x, cfg.decay, cfg.scale)?;
    let sampler = GaussianFactor::new(&c_xx)?;
    let mut rng = rng_for(derive_seed(cfg.seed, CALIBRATION_STREAM));
    let psi2_x = psi2_estimate(&sampler.sample(cfg.calibration_samples, &mut rng), cfg.p_max)?;
    let bound = concentration_bound(psi2_x, n, cfg.delta);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let trials: Vec<ConcentrationTrial> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let xs = sampler.sample(n, &mut rng_for(derive_seed(cfg.seed, trial as u64)));
                let deviation = empirical_cov(&xs, &xs)?.sub(&c_xx)?.hs_norm();
                Ok(ConcentrationTrial {
                    trial,
                    deviation,
                    covered: deviation <= bound,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let coverage = trials.iter().filter(|t| t.covered).count() as f64 / trials.len() as f64;
    Ok(ConcentrationReport {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        n,
        delta: cfg.delta,
        trials,
        bound,
        coverage,
        psi2_x,
        p_max: cfg.p_max,
        calibration_samples: cfg.calibration_samples,
    })
}

pub fn write_concentration_outputs(report: &ConcentrationReport, dir: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    let path = dir.join("conc.csv");
    let mut csv = CsvOut::create(&path, &report.config_hash, report.seed, &CONC_HEADER)?;
    for t in &report.trials {
        csv.row([t.trial.to_string(), fmt_f64(t.deviation), fmt_f64(report.bound), t.covered.to_string()])?;
    }
    csv.finish()?;
    paths.push(path);

    let path = dir.join("conc_report.json");
    let mut summary = serde_json::to_value(report)?;
    summary.as_object_mut().expect("struct").remove("trials");
    std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
    paths.push(path);

    if plots {
        let mut sorted: Vec<f64> = report.trials.iter().map(|t| t.deviation).collect();
        sorted.sort_by(f64::total_cmp);
        let k = sorted.len() as f64;
        let path = dir.join("conc.svg");
        let svg = svg_line_plot(
            "empirical CDF of HS deviation",
            "deviation",
            "fraction",
            &[Series {
                name: "trials",
                points: sorted.iter().enumerate().map(|(i, &d)| (d, (i + 1) as f64 / k)).collect(),
            }],
            false,
        );
        std::fs::write(&path, svg)?;
        paths.push(path);
    }
    Ok(paths)
}
