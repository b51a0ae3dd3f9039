//! Vector-valued regression through explicit feature lifts.

use nalgebra::DMatrix;
use rand::Rng;

use opreg::applications::cme::{cme_fit, cme_predict, FeatureLift};
use opreg::regularize::RegStrategy;
use opreg::synthesize::rng_for;

fn target(x: f64) -> [f64; 2] {
    [(3.0 * x).sin(), x * x - 0.5]
}

fn main() -> opreg::Result<()> {
    let mut rng = rng_for(3);
    let n = 400;
    let xs = DMatrix::from_fn(n, 1, |_, _| rng.random_range(-1.0..1.0));
    let ys = DMatrix::from_fn(n, 2, |i, j| target(xs[(i, 0)])[j] + 0.05 * rng.random_range(-1.0..1.0));
    let s = RegStrategy::tikhonov();

    let lifts = [
        ("linear", FeatureLift::polynomial(1, 1)),
        ("cubic", FeatureLift::polynomial(1, 3)),
        ("fourier", FeatureLift::random_fourier(1, 100, 0.4, 9)?),
    ];
    for (name, lift) in &lifts {
        let fit = cme_fit(&xs, &ys, lift, &s, 1e-5)?;
        let grid: Vec<f64> = (0..=20).map(|k| -1.0 + 0.1 * k as f64).collect();
        let mut mse = 0.0;
        for &x in &grid {
            let p = cme_predict(&fit, lift, &[x])?;
            let t = target(x);
            mse += (p.as_slice()[0] - t[0]).powi(2) + (p.as_slice()[1] - t[1]).powi(2);
        }
        println!("{name:<8} d_φ = {:>3}  grid MSE {:.2e}", lift.dim(), mse / grid.len() as f64);
    }
    Ok(())
}
