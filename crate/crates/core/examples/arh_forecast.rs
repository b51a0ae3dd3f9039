//! Fit an ARH(2) model on a simulated trajectory and forecast one step ahead.

use opreg::applications::arh::{arh_fit, arh_forecast, simulate_arh};
use opreg::hilbert::{HOperator, HVector};
use opreg::regularize::RegStrategy;

fn main() -> opreg::Result<()> {
    let theta1 = HOperator::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.0, 0.3, 0.1, 0.0, 0.0, -0.2])?;
    let theta2 = HOperator::from_diagonal(&[-0.2, 0.1, 0.2])?;
    let truth = [theta1, theta2];
    let s = RegStrategy::tikhonov();

    for len in [2_000, 20_000, 200_000] {
        let traj = simulate_arh(&truth, 1.0, len, 500, 42)?;
        let fit = arh_fit(&traj, 2, &s, 1e-3)?;
        let err: f64 = truth
            .iter()
            .zip(&fit.model.blocks)
            .map(|(t, e)| t.sub(e).map(|d| d.hs_norm().powi(2)))
            .sum::<opreg::Result<f64>>()?
            .sqrt();
        println!("T = {len:>6}: block HS error {err:.4}");
    }

    let traj = simulate_arh(&truth, 1.0, 5_000, 500, 1)?;
    let model = arh_fit(&traj, 2, &s, 1e-3)?.model;
    let t = traj.nrows();
    let history = [
        HVector::new(traj.row(t - 2).transpose())?,
        HVector::new(traj.row(t - 1).transpose())?,
    ];
    println!("next-step forecast: {:?}", arh_forecast(&model, &history)?.as_slice());
    Ok(())
}
