//! End-to-end demos of the two applications with metric and plot-data output.

use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::config::{LiftConfig, StudyConfig};
use super::output::{fmt_f64, svg_line_plot, CsvOut, Series};
use crate::applications::arh::{arh_fit, arh_forecast_path, simulate_arh};
use crate::applications::cme::{cme_fit, FeatureLift};
use crate::applications::ingest::read_trajectory_file;
use crate::error::{Error, Result};
use crate::hilbert::HOperator;
use crate::synthesize::{derive_seed, random_operator, rng_for};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DemoKind {
    Arh,
    Cme,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArhDemoReport {
    pub source: String,
    pub order: usize,
    pub train_len: usize,
    pub test_len: usize,
    pub forecast_mse: f64,
    /// MSE of the zero forecast, i.e. the mean squared norm of the test values.
    pub zero_forecast_mse: f64,
    /// Only for synthetic trajectories.
    pub oracle_forecast_mse: Option<f64>,
    pub noise_trace: Option<f64>,
    pub theta_hs_error: Option<f64>,
    pub psd_repaired: bool,
    #[serde(skip)]
    pub actual: DMatrix<f64>,
    #[serde(skip)]
    pub forecast: DMatrix<f64>,
}

/// Blocks `θ_i` with `‖θ_i‖_op = op_norm`.
pub fn synthetic_arh_blocks(d: usize, order: usize, op_norm: f64, seed: u64) -> Vec<HOperator> {
    let mut rng = rng_for(seed);
    (0..order)
        .map(|_| {
            let m = random_operator(d, d, &mut rng);
            let norm = m.op_norm();
            if norm > 0.0 {
                m.scale(op_norm / norm)
            } else {
                m
            }
        })
        .collect()
}

fn mean_sq_rows(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm_squared()).sum::<f64>() / m.nrows() as f64
}

pub fn run_arh_demo(cfg: &StudyConfig) -> Result<ArhDemoReport> {
    let a = &cfg.arh;
    let strategy = cfg.strategy()?;
    let (traj, truth, source) = match &a.trajectory {
        Some(p) => {
            let path = cfg.resolve_path(p);
            (read_trajectory_file(&path)?, None, path.display().to_string())
        }
        None => {
            if a.op_norm * a.order as f64 >= 1.0 {
                log::warn!("order·op_norm >= 1; the simulated process may be non-stationary");
            }
            let blocks = synthetic_arh_blocks(a.d_y, a.order, a.op_norm, derive_seed(cfg.seed, 0));
            let traj = simulate_arh(&blocks, a.noise_std, a.len, a.burn_in, derive_seed(cfg.seed, 1))?;
            (traj, Some(blocks), "synthetic".to_string())
        }
    };
    let r = a.order;
    let t_len = traj.nrows();
    let train_len = ((1.0 - a.test_fraction) * t_len as f64).round() as usize;
    if train_len <= 10 * r || t_len - train_len < 1 {
        return Err(Error::Precondition(format!(
            "trajectory of length {t_len} too short for order {r} and test fraction {}",
            a.test_fraction
        )));
    }
    let fitted = arh_fit(&traj.rows(0, train_len).into_owned(), r, &strategy, a.alpha)?;
    // forecast window keeps r rows of history before the first test step
    let window = traj.rows(train_len - r, t_len - train_len + r).into_owned();
    let forecast = arh_forecast_path(&fitted.model, &window)?;
    let actual = window.rows(r, t_len - train_len).into_owned();
    let forecast_mse = mean_sq_rows(&(&actual - &forecast));

    let (oracle_forecast_mse, noise_trace, theta_hs_error) = match &truth {
        Some(blocks) => {
            let mut oracle = fitted.model.clone();
            oracle.blocks = blocks.clone();
            let oracle_fc = arh_forecast_path(&oracle, &window)?;
            let err: f64 = blocks
                .iter()
                .zip(&fitted.model.blocks)
                .map(|(t, e)| t.sub(e).map(|d| d.hs_norm().powi(2)))
                .sum::<Result<f64>>()?
                .sqrt();
            (
                Some(mean_sq_rows(&(&actual - &oracle_fc))),
                Some(a.d_y as f64 * a.noise_std * a.noise_std),
                Some(err),
            )
        }
        None => (None, None, None),
    };
    Ok(ArhDemoReport {
        source,
        order: r,
        train_len,
        test_len: t_len - train_len,
        forecast_mse,
        zero_forecast_mse: mean_sq_rows(&actual),
        oracle_forecast_mse,
        noise_trace,
        theta_hs_error,
        psd_repaired: fitted.psd_repaired,
        actual,
        forecast,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CmeRow {
    pub n: usize,
    pub train_mse: f64,
    pub test_mse: f64,
    /// Held-out MSE against the noiseless conditional mean.
    pub test_excess_mse: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CmeDemoReport {
    pub feature_dim: usize,
    pub rows: Vec<CmeRow>,
}

/// Conditional mean of the CME demo on `ξ ∈ [−1, 1]²`.
pub fn cme_target(xi: &[f64]) -> [f64; 3] {
    use std::f64::consts::PI;
    let (a, b) = (xi[0], xi[1]);
    [(PI * a).sin() * (0.5 * PI * b).cos(), a * b, (-(a * a + b * b)).exp()]
}

fn cme_sample(n: usize, noise_std: f64, seed: u64) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut rng = rng_for(seed);
    let xs = DMatrix::from_fn(n, 2, |_, _| rng.random_range(-1.0..1.0));
    let mean = DMatrix::from_fn(n, 3, |i, j| cme_target(&[xs[(i, 0)], xs[(i, 1)]])[j]);
    let noise = random_operator(n, 3, &mut rng).into_matrix() * noise_std;
    let ys = &mean + noise;
    (xs, ys, mean)
}

fn build_lift(lift: &LiftConfig, seed: u64) -> Result<FeatureLift> {
    match *lift {
        LiftConfig::Polynomial { degree } => Ok(FeatureLift::polynomial(2, degree)),
        LiftConfig::RandomFourier { bandwidth, features } => FeatureLift::random_fourier(2, features, bandwidth, seed),
    }
}

pub fn run_cme_demo(cfg: &StudyConfig) -> Result<CmeDemoReport> {
    let c = &cfg.cme;
    let strategy = cfg.strategy()?;
    let lift = build_lift(&c.lift, derive_seed(cfg.seed, 0))?;
    let (test_x, test_y, test_mean) = cme_sample(c.test_size, c.noise_std, derive_seed(cfg.seed, 1));
    let test_phi = lift.lift_rows(&test_x)?;
    let rows = c
        .n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let (xs, ys, _) = cme_sample(n, c.noise_std, derive_seed(cfg.seed, 2 + i as u64));
            let fitted = cme_fit(&xs, &ys, &lift, &strategy, c.alpha)?;
            let theta_t = fitted.theta_hat.matrix().transpose();
            let train_pred = lift.lift_rows(&xs)? * &theta_t;
            let test_pred = &test_phi * &theta_t;
            Ok(CmeRow {
                n,
                train_mse: mean_sq_rows(&(&ys - train_pred)),
                test_mse: mean_sq_rows(&(&test_y - &test_pred)),
                test_excess_mse: mean_sq_rows(&(&test_mean - &test_pred)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CmeDemoReport {
        feature_dim: lift.dim(),
        rows,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Runs a demo and writes its metric CSV, plot-data CSV, JSON summary and
/// optional SVG into `dir`.
pub fn run_demo(kind: DemoKind, cfg: &StudyConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    cfg.validate()?;
    std::fs::create_dir_all(dir)?;
    let (hash, seed) = (cfg.hash(), cfg.seed);
    let mut paths = Vec::new();
    match kind {
        DemoKind::Arh => {
            let report = run_arh_demo(cfg)?;
            let path = dir.join("arh_metrics.csv");
            let mut csv = CsvOut::create(&path, &hash, seed, &["metric", "value"])?;
            let mut metrics = vec![
                ("forecast_mse", report.forecast_mse),
                ("zero_forecast_mse", report.zero_forecast_mse),
            ];
            metrics.extend(report.oracle_forecast_mse.map(|v| ("oracle_forecast_mse", v)));
            metrics.extend(report.noise_trace.map(|v| ("noise_trace", v)));
            metrics.extend(report.theta_hs_error.map(|v| ("theta_hs_error", v)));
            for (k, v) in metrics {
                csv.row([k.to_string(), fmt_f64(v)])?;
            }
            csv.finish()?;
            paths.push(path);

            let path = dir.join("arh_forecast.csv");
            let mut csv = CsvOut::create(&path, &hash, seed, &["step", "component", "actual", "forecast"])?;
            for t in 0..report.actual.nrows() {
                for j in 0..report.actual.ncols() {
                    csv.row([t.to_string(), j.to_string(), fmt_f64(report.actual[(t, j)]), fmt_f64(report.forecast[(t, j)])])?;
                }
            }
            csv.finish()?;
            paths.push(path);

            let path = dir.join("arh_report.json");
            write_json(&path, &report)?;
            paths.push(path);
            if cfg.plots {
                let steps = report.actual.nrows().min(200);
                let series = |m: &DMatrix<f64>| (0..steps).map(|t| (t as f64, m[(t, 0)])).collect();
                let path = dir.join("arh_forecast.svg");
                let svg = svg_line_plot(
                    "one-step forecasts, first component",
                    "step",
                    "value",
                    &[
                        Series {
                            name: "actual",
                            points: series(&report.actual),
                        },
                        Series {
                            name: "forecast",
                            points: series(&report.forecast),
                        },
                    ],
                    false,
                );
                std::fs::write(&path, svg)?;
                paths.push(path);
            }
        }
        DemoKind::Cme => {
            let report = run_cme_demo(cfg)?;
            let path = dir.join("cme_metrics.csv");
            let mut csv = CsvOut::create(&path, &hash, seed, &["n", "train_mse", "test_mse", "test_excess_mse"])?;
            for r in &report.rows {
                csv.row([r.n.to_string(), fmt_f64(r.train_mse), fmt_f64(r.test_mse), fmt_f64(r.test_excess_mse)])?;
            }
            csv.finish()?;
            paths.push(path);
            let path = dir.join("cme_report.json");
            write_json(&path, &report)?;
            paths.push(path);
            if cfg.plots {
                let pts = |f: fn(&CmeRow) -> f64| report.rows.iter().map(|r| (r.n as f64, f(r))).collect();
                let path = dir.join("cme_mse.svg");
                let svg = svg_line_plot(
                    "kernel regression error",
                    "n",
                    "MSE",
                    &[
                        Series {
                            name: "train",
                            points: pts(|r| r.train_mse),
                        },
                        Series {
                            name: "test",
                            points: pts(|r| r.test_mse),
                        },
                    ],
                    true,
                );
                std::fs::write(&path, svg)?;
                paths.push(path);
            }
        }
    }
    Ok(paths)
}
