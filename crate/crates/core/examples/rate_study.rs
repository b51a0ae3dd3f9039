//! Empirical convergence rate of the tikhonov estimator under a source condition.

use opreg::bench::rate::run_rate_study;
use opreg::bench::StudyConfig;

fn main() -> opreg::Result<()> {
    let cfg = StudyConfig {
        replications: 10,
        ..StudyConfig::default()
    };
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let report = run_rate_study(&cfg, threads)?;
    println!("{:>6} {:>12} {:>12}", "n", "median s=0", "median s=½");
    for s in &report.summaries {
        println!("{:>6} {:>12.5} {:>12.5}", s.n, s.median_s0, s.median_s05);
    }
    for s in [&report.slope_s0, &report.slope_s05] {
        println!(
            "s = {}: fitted slope {:.3} ± {:.3}, theory {:.3}",
            s.s,
            s.fit.slope,
            s.fit.ci_high - s.fit.slope,
            s.theoretical
        );
    }
    Ok(())
}
