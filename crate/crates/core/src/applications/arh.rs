//! Hilbertian autoregression of order `r` as a regression on the stacked
//! state `X_t = (Y_{t−1}, …, Y_{t−r}) ∈ 𝒴^r`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::SampleSet;
use crate::hilbert::{eig_sym, HOperator, HVector};
use crate::regularize::{regularized_inverse_decomp, RegStrategy};
use crate::synthesize::{rng_for, GaussianFactor};

/// How the `r·d_Y` block covariance of the stacked state is estimated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockAssembly {
    /// Block `(i, j)` is the lag covariance `Ĉ_{j−i}` (transposed for
    /// negative lags), all lags estimated on the common window `t = r+1..T`.
    #[default]
    StationaryToeplitz,
    /// Block `(i, j)` is `(1/(T−r)) Σ_t Y_{t−i} ⊗ Y_{t−j}`; identical to a
    /// plain fit on the lagged pairs `(X_t, Y_t)`.
    LaggedWindow,
}

#[derive(Clone, Debug)]
pub struct ArhModel {
    pub order: usize,
    /// `θ_1, …, θ_r`, each `d_Y x d_Y`.
    pub blocks: Vec<HOperator>,
    pub strategy: RegStrategy,
    pub alpha: f64,
    pub assembly: BlockAssembly,
}

impl ArhModel {
    pub fn d_y(&self) -> usize {
        self.blocks[0].d_out()
    }

    /// The stacked operator `[θ_1 | … | θ_r] : 𝒴^r → 𝒴`.
    pub fn stacked(&self) -> HOperator {
        stack_blocks(&self.blocks)
    }
}

#[derive(Clone, Debug)]
pub struct ArhFit {
    pub model: ArhModel,
    /// Smallest eigenvalue of the symmetrised block covariance before repair.
    pub min_block_eigenvalue: f64,
    /// Whether negative eigenvalues were clipped to zero.
    pub psd_repaired: bool,
    /// Number of time steps in the estimation window, `T − r`.
    pub window: usize,
}

fn check_trajectory(traj: &DMatrix<f64>) -> Result<()> {
    if traj.ncols() == 0 {
        return Err(Error::InvalidParameter("trajectory has no columns".into()));
    }
    if traj.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("trajectory"));
    }
    Ok(())
}

/// `Ĉ_k = (1/(T−r)) Σ_{t=r+1}^{T} Y_t ⊗ Y_{t−k}` for `k = 0..=r`.
pub fn arh_lag_covs(traj: &DMatrix<f64>, r: usize) -> Result<Vec<HOperator>> {
    check_trajectory(traj)?;
    let t_len = traj.nrows();
    if t_len <= r {
        return Err(Error::Precondition(format!("trajectory length {t_len} must exceed order {r}")));
    }
    let window = t_len - r;
    let current = traj.rows(r, window);
    (0..=r)
        .map(|k| {
            let lagged = traj.rows(r - k, window);
            HOperator::new(current.transpose() * lagged / window as f64)
        })
        .collect()
}

/// The regression pairs `(X_t, Y_t)`, `X_t = (Y_{t−1}, …, Y_{t−r})`, `t = r+1..T`.
pub fn lagged_pairs(traj: &DMatrix<f64>, r: usize) -> Result<SampleSet> {
    check_trajectory(traj)?;
    let (t_len, d) = traj.shape();
    if r == 0 || t_len <= r {
        return Err(Error::Precondition(format!("need 1 <= r < T, got r={r} T={t_len}")));
    }
    let window = t_len - r;
    let mut xs = DMatrix::zeros(window, r * d);
    for i in 1..=r {
        xs.columns_mut((i - 1) * d, d).copy_from(&traj.rows(r - i, window));
    }
    SampleSet::new(xs, traj.rows(r, window).into_owned())
}

fn assemble_toeplitz(lags: &[HOperator], r: usize, d: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut block = DMatrix::zeros(r * d, r * d);
    for i in 0..r {
        for j in 0..r {
            let m = if j >= i {
                lags[j - i].matrix().clone()
            } else {
                lags[i - j].matrix().transpose()
            };
            block.view_mut((i * d, j * d), (d, d)).copy_from(&m);
        }
    }
    let mut cross = DMatrix::zeros(d, r * d);
    for j in 0..r {
        cross.view_mut((0, j * d), (d, d)).copy_from(lags[j + 1].matrix());
    }
    (block, cross)
}

/// Fits an ARH-`r` model with the stationary block-Toeplitz estimator.
pub fn arh_fit(traj: &DMatrix<f64>, r: usize, s: &RegStrategy, alpha: f64) -> Result<ArhFit> {
    arh_fit_with(traj, r, s, alpha, BlockAssembly::StationaryToeplitz)
}

pub fn arh_fit_with(traj: &DMatrix<f64>, r: usize, s: &RegStrategy, alpha: f64, assembly: BlockAssembly) -> Result<ArhFit> {
    check_trajectory(traj)?;
    let (t_len, d) = traj.shape();
    if r == 0 {
        return Err(Error::InvalidParameter("order r must be >= 1".into()));
    }
    if t_len <= 10 * r {
        return Err(Error::Precondition(format!(
            "trajectory length {t_len} must exceed 10·r = {}",
            10 * r
        )));
    }
    let (block, cross) = match assembly {
        BlockAssembly::StationaryToeplitz => assemble_toeplitz(&arh_lag_covs(traj, r)?, r, d),
        BlockAssembly::LaggedWindow => {
            let pairs = lagged_pairs(traj, r)?;
            (pairs.cov_xx().into_matrix(), pairs.cov_yx().into_matrix())
        }
    };
    let block = HOperator::new(block)?.symmetrized()?;
    let eig = eig_sym(&block)?;
    let min_eig = eig.min_eigenvalue();
    let tol = 1e-10 * (1.0 + eig.max_eigenvalue().abs());
    let (eig, psd_repaired) = if min_eig < -tol {
        log::warn!("block covariance has eigenvalue {min_eig:e}; clipping to PSD");
        let clipped = eig.eigenvalues().map(|l| l.max(0.0));
        (eig_sym(&eig.synthesize(&clipped))?, true)
    } else {
        (eig, false)
    };
    let g = regularized_inverse_decomp(s, alpha, &eig)?;
    let theta = HOperator::new(cross)?.compose(&g)?;
    let blocks = split_blocks(&theta, r, d);
    Ok(ArhFit {
        model: ArhModel {
            order: r,
            blocks,
            strategy: s.resolved_for(eig.max_eigenvalue().max(0.0)),
            alpha,
            assembly,
        },
        min_block_eigenvalue: min_eig,
        psd_repaired,
        window: t_len - r,
    })
}

fn split_blocks(theta: &HOperator, r: usize, d: usize) -> Vec<HOperator> {
    (0..r)
        .map(|i| HOperator::wrap(theta.matrix().columns(i * d, d).into_owned()))
        .collect()
}

fn stack_blocks(blocks: &[HOperator]) -> HOperator {
    let d = blocks[0].d_out();
    let mut out = DMatrix::zeros(d, d * blocks.len());
    for (i, b) in blocks.iter().enumerate() {
        out.columns_mut(i * d, d).copy_from(b.matrix());
    }
    HOperator::wrap(out)
}

/// One-step forecast `Σ_i θ_i Y_{t−i}`. `history` is chronological: its
/// last element is `Y_{t−1}`.
pub fn arh_forecast(model: &ArhModel, history: &[HVector]) -> Result<HVector> {
    if history.len() != model.order {
        return Err(Error::shape("arh_forecast", format!("{} history values", model.order), history.len().to_string()));
    }
    let d = model.d_y();
    let mut out = DVector::zeros(d);
    for (i, block) in model.blocks.iter().enumerate() {
        let y = &history[history.len() - 1 - i];
        out += block.apply(y)?.into_inner();
    }
    HVector::new(out)
}

/// One-step forecasts for every `t = r+1..T` of a trajectory, as rows.
pub fn arh_forecast_path(model: &ArhModel, traj: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let pairs = lagged_pairs(traj, model.order)?;
    Ok(pairs.xs() * model.stacked().matrix().transpose())
}

/// Simulates `Y_t = Σ θ_i Y_{t−i} + ε_t` with `ε_t ~ N(0, σ² I)` from a zero
/// start, discarding `burn_in` steps.
pub fn simulate_arh(blocks: &[HOperator], noise_std: f64, len: usize, burn_in: usize, seed: u64) -> Result<DMatrix<f64>> {
    if blocks.is_empty() {
        return Err(Error::InvalidParameter("at least one block required".into()));
    }
    let d = blocks[0].d_out();
    if blocks.iter().any(|b| b.shape() != (d, d)) {
        return Err(Error::InvalidParameter("ARH blocks must all be square of equal size".into()));
    }
    let r = blocks.len();
    let total = len + burn_in;
    let mut rng = rng_for(seed);
    let noise = GaussianFactor::new(&HOperator::identity(d).scale(noise_std * noise_std))?.sample(total, &mut rng);
    let mut path = DMatrix::zeros(total, d);
    for t in 0..total {
        let mut y = noise.row(t).transpose();
        for (i, b) in blocks.iter().enumerate() {
            if t > i {
                y += b.matrix() * path.row(t - 1 - i).transpose();
            }
        }
        path.set_row(t, &y.transpose());
    }
    let _ = r;
    Ok(path.rows(burn_in, len).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::fit;
    use approx::assert_abs_diff_eq;

    fn arh1_theta() -> HOperator {
        let d = 3;
        let m = DMatrix::from_fn(d, d, |i, j| if i == j { 0.5 } else if j == i + 1 { 0.2 } else { 0.0 });
        HOperator::new(m).unwrap()
    }

    #[test]
    fn lag_covs_of_constant_trajectory() {
        let y = [1.0, -2.0, 0.5];
        let traj = DMatrix::from_fn(20, 3, |_, j| y[j]);
        let lags = arh_lag_covs(&traj, 3).unwrap();
        let yy = crate::hilbert::outer(&HVector::from_slice(&y).unwrap(), &HVector::from_slice(&y).unwrap());
        assert_eq!(lags.len(), 4);
        for c in &lags {
            assert_abs_diff_eq!(c.matrix(), yy.matrix(), epsilon = 1e-14);
        }
        assert!(arh_lag_covs(&traj.rows(0, 3).into_owned(), 3).is_err());
    }

    #[test]
    fn lag_covs_of_white_noise() {
        let t_len = 40_000;
        let traj = simulate_arh(&[HOperator::zeros(2, 2)], 1.0, t_len, 0, 8).unwrap();
        let lags = arh_lag_covs(&traj, 1).unwrap();
        let sd = 1.0 / (t_len as f64).sqrt();
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                // Var(Y²) = 2 on the diagonal, 1 off it
                assert!((lags[0].matrix()[(i, j)] - target).abs() < 3.0 * 2f64.sqrt() * sd);
                assert!(lags[1].matrix()[(i, j)].abs() < 3.0 * sd * 1.5);
            }
        }
    }

    #[test]
    fn yule_walker_residual_shrinks() {
        let theta = arh1_theta();
        let mut prev = f64::INFINITY;
        for t_len in [1_000, 10_000, 100_000] {
            let traj = simulate_arh(&[theta.clone()], 1.0, t_len, 200, 12).unwrap();
            let lags = arh_lag_covs(&traj, 1).unwrap();
            let resid = lags[1].sub(&theta.compose(&lags[0]).unwrap()).unwrap().hs_norm();
            assert!(resid < prev, "residual {resid} at T={t_len}");
            prev = resid;
        }
    }

    #[test]
    fn lagged_window_order_one_equals_plain_fit() {
        let traj = simulate_arh(&[arh1_theta()], 1.0, 500, 50, 3).unwrap();
        let s = RegStrategy::tikhonov();
        let arh = arh_fit_with(&traj, 1, &s, 1e-3, BlockAssembly::LaggedWindow).unwrap();
        let pairs = lagged_pairs(&traj, 1).unwrap();
        let direct = fit(&pairs, &s, 1e-3).unwrap();
        let diff = arh.model.blocks[0].sub(&direct.theta_hat).unwrap().hs_norm();
        assert!(diff <= 1e-12, "diff {diff}");
    }

    #[test]
    fn toeplitz_order_one_close_to_plain_fit() {
        let traj = simulate_arh(&[arh1_theta()], 1.0, 5_000, 50, 3).unwrap();
        let s = RegStrategy::tikhonov();
        let arh = arh_fit(&traj, 1, &s, 1e-3).unwrap();
        let direct = fit(&lagged_pairs(&traj, 1).unwrap(), &s, 1e-3).unwrap();
        assert!(arh.model.blocks[0].sub(&direct.theta_hat).unwrap().hs_norm() < 0.01);
    }

    #[test]
    fn forecast_examples() {
        let model = ArhModel {
            order: 1,
            blocks: vec![HOperator::identity(2)],
            strategy: RegStrategy::tikhonov(),
            alpha: 0.1,
            assembly: BlockAssembly::default(),
        };
        let last = HVector::from_slice(&[0.3, -1.0]).unwrap();
        assert_eq!(arh_forecast(&model, &[last.clone()]).unwrap(), last);
        assert_eq!(arh_forecast(&model, &[HVector::zeros(2)]).unwrap(), HVector::zeros(2));
        assert!(arh_forecast(&model, &[]).is_err());

        let two = ArhModel {
            order: 2,
            blocks: vec![HOperator::identity(2), HOperator::identity(2).scale(-0.5)],
            ..model
        };
        let older = HVector::from_slice(&[2.0, 2.0]).unwrap();
        let f = arh_forecast(&two, &[older, last]).unwrap();
        assert_abs_diff_eq!(f.as_slice()[0], 0.3 - 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.as_slice()[1], -1.0 - 1.0, epsilon = 1e-15);
    }

    #[test]
    fn short_trajectory_rejected() {
        let traj = DMatrix::zeros(10, 2);
        assert!(matches!(
            arh_fit(&traj, 1, &RegStrategy::tikhonov(), 0.1),
            Err(Error::Precondition(_))
        ));
    }
}
