//! The precomposition operator `θ ↦ θC` and its Kronecker matrix share
//! spectrum, norm and functional calculus with `C`.

use opreg::hilbert::eig_sym;
use opreg::precompose::{precompose_apply, precompose_oracle};
use opreg::regularize::{regularized_inverse, RegStrategy};
use opreg::synthesize::{random_operator, random_psd, rng_for};

fn main() -> opreg::Result<()> {
    let mut rng = rng_for(7);
    let (d_x, d_y) = (4, 3);
    let c = random_psd(d_x, 3, &mut rng);
    let rep = precompose_oracle(&c, d_y)?;
    let oracle = rep.oracle().expect("small enough to materialise");

    println!("eigenvalues of C:      {:.6?}", eig_sym(&c)?.eigenvalues().as_slice());
    println!("eigenvalues of oracle: {:.6?}", eig_sym(oracle)?.eigenvalues().as_slice());
    println!("‖C‖_op = {:.12}, ‖A_C‖_op = {:.12}", c.op_norm(), oracle.op_norm());

    let theta = random_operator(d_y, d_x, &mut rng);
    let direct = precompose_apply(&c, &theta)?;
    let via_oracle = rep.apply_oracle(&theta)?;
    println!("θC vs oracle·vec(θ): {:.3e}", direct.sub(&via_oracle)?.hs_norm());

    let s = RegStrategy::tikhonov();
    let lhs = regularized_inverse(&s, 0.1, oracle)?;
    let rhs = precompose_oracle(&regularized_inverse(&s, 0.1, &c)?, d_y)?;
    println!(
        "g(A_C) vs A_(g(C)), tikhonov α=0.1: {:.3e}",
        lhs.sub(rhs.oracle().expect("materialised"))?.hs_norm()
    );
    Ok(())
}
