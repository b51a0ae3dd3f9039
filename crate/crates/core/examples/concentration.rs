//! Coverage of the sub-Gaussian bound on `‖Ĉ_XX − C_XX‖_HS`.

use opreg::bench::conc::run_concentration_study;
use opreg::bench::StudyConfig;
use opreg::synthesize::{make_covariance, psi2_estimate, rng_for, Decay, GaussianFactor};

fn main() -> opreg::Result<()> {
    let c = make_covariance(40, Decay::Polynomial { rate: 2.0 }, 1.0)?;
    let xs = GaussianFactor::new(&c)?.sample(20_000, &mut rng_for(1));
    for p_max in [4, 8, 16, 32] {
        println!("ψ2 estimate with p ≤ {p_max:>2}: {:.4}", psi2_estimate(&xs, p_max)?);
    }

    let report = run_concentration_study(&StudyConfig::default(), 1)?;
    let worst = report.trials.iter().map(|t| t.deviation).fold(0.0, f64::max);
    println!(
        "n = {}, δ = {}: bound {:.4}, worst deviation {:.4}, coverage {:.3}",
        report.n, report.delta, report.bound, worst, report.coverage
    );
    Ok(())
}
