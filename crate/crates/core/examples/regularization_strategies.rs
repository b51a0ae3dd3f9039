//! Filter functions of the built-in strategies and their declared constants.

use opreg::regularize::{
    default_alpha_grid, default_lambda_grid, g_eval, qualification_check, verify_strategy, RegStrategy,
};

fn main() -> opreg::Result<()> {
    let strategies = [RegStrategy::tikhonov(), RegStrategy::truncation(), RegStrategy::landweber(Some(0.5))];
    let alpha = 0.1;
    println!("{:>8} {:>12} {:>12} {:>12}", "lambda", "tikhonov", "truncation", "landweber");
    for lambda in [0.01, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0] {
        let g: Vec<f64> = strategies.iter().map(|s| g_eval(s, alpha, lambda)).collect::<opreg::Result<_>>()?;
        println!("{lambda:>8} {:>12.5} {:>12.5} {:>12.5}", g[0], g[1], g[2]);
    }

    let (alphas, lambdas) = (default_alpha_grid(), default_lambda_grid());
    for s in &strategies {
        let c = verify_strategy(s, &alphas, &lambdas)?;
        println!(
            "{:<10} sup|λg| {:.4}  sup|1−λg| {:.4}  sup α|g| {:.4}  pass {}",
            s.name(),
            c.sup_lambda_g,
            c.sup_residual,
            c.sup_alpha_g,
            c.passed()
        );
        for q in [1.0, 2.0] {
            let qc = qualification_check(s, q, &alphas, &lambdas)?;
            println!("           q = {q}: sup {:.4e}, γ_q {:.4e}, pass {}", qc.sup_ratio, qc.declared_gamma_q, qc.passed);
        }
    }
    Ok(())
}
