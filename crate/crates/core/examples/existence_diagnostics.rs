//! Whether `θ C_XX = C_YX` has a bounded solution, and its norms.

use opreg::hilbert::{HOperator, DEFAULT_RANK_TOL};
use opreg::precompose::{douglas_check, solve_pseudo, source_condition_value};

fn main() -> opreg::Result<()> {
    let c_xx = HOperator::from_diagonal(&[1.0, 0.5, 0.0])?;

    let theta = HOperator::from_row_slice(1, 3, &[1.0, 2.0, 7.0])?;
    let c_yx = theta.compose(&c_xx)?;
    let report = douglas_check(&c_xx, &c_yx, DEFAULT_RANK_TOL)?;
    println!("consistent pair: range inclusion = {}", report.range_inclusion);
    println!("  ‖θ⋆‖_op = {:.6}, ‖θ⋆‖²_HS = {:.6}", report.sup_ratio_opnorm, report.hs_norm_sq);
    // the kernel coordinate of θ is invisible; the minimal-norm solution drops it
    println!("  θ⋆ = {}", solve_pseudo(&c_xx, &c_yx, DEFAULT_RANK_TOL)?);
    println!("  ‖C_YX (C^2)†‖² (ν = 1) = {:.6}", source_condition_value(&c_xx, &c_yx, 1.0, DEFAULT_RANK_TOL)?);

    let leaky = HOperator::from_row_slice(1, 3, &[1.0, 0.0, 0.3])?;
    let report = douglas_check(&c_xx, &leaky, DEFAULT_RANK_TOL)?;
    println!("C_YX with mass on ker C_XX: range inclusion = {}", report.range_inclusion);
    println!("  source value = {}", source_condition_value(&c_xx, &leaky, 1.0, DEFAULT_RANK_TOL)?);
    Ok(())
}
