//! The precomposition operator `A_C[θ] = θC` on operator space.
//!
//! `A_C` is the forward map of the regression inverse problem
//! `θ C_XX = C_YX`. A dense Kronecker matrix of `A_C` can be materialised for
//! small dimensions as an independent oracle for the spectral identities.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::hilbert::{eig_sym, hs_inner, pseudoinverse, HOperator};

/// Refuse to materialise oracles with more than this many rows.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// `θ ↦ θC`.
pub fn precompose_apply(c: &HOperator, theta: &HOperator) -> Result<HOperator> {
    if !c.is_square() {
        return Err(Error::NonSquare {
            op: "precompose_apply",
            rows: c.d_out(),
            cols: c.d_in(),
        });
    }
    if theta.d_in() != c.d_out() {
        return Err(Error::shape(
            "precompose_apply",
            format!("theta with {} columns", c.d_out()),
            format!("{} columns", theta.d_in()),
        ));
    }
    theta.compose(c)
}

/// Column-stacking vectorisation.
pub fn vec_op(theta: &HOperator) -> DVector<f64> {
    DVector::from_column_slice(theta.matrix().as_slice())
}

pub fn unvec_op(v: &DVector<f64>, d_out: usize, d_in: usize) -> Result<HOperator> {
    if v.len() != d_out * d_in {
        return Err(Error::shape("unvec_op", (d_out * d_in).to_string(), v.len().to_string()));
    }
    HOperator::new(DMatrix::from_column_slice(d_out, d_in, v.as_slice()))
}

/// `C` together with its materialised Kronecker representation `Cᵀ ⊗ I_{d_Y}`
/// acting on `vec(θ)`.
#[derive(Clone, Debug)]
pub struct PrecomposeRep {
    c: HOperator,
    d_y: usize,
    oracle: Option<HOperator>,
}

impl PrecomposeRep {
    /// Lazy representation; the oracle is not built.
    pub fn new(c: HOperator, d_y: usize) -> Result<Self> {
        if !c.is_square() {
            return Err(Error::NonSquare {
                op: "PrecomposeRep",
                rows: c.d_out(),
                cols: c.d_in(),
            });
        }
        Ok(Self { c, d_y, oracle: None })
    }

    pub fn covariance(&self) -> &HOperator {
        &self.c
    }

    pub fn d_y(&self) -> usize {
        self.d_y
    }

    pub fn oracle(&self) -> Option<&HOperator> {
        self.oracle.as_ref()
    }

    pub fn apply(&self, theta: &HOperator) -> Result<HOperator> {
        if theta.d_out() != self.d_y {
            return Err(Error::shape("PrecomposeRep::apply", self.d_y.to_string(), theta.d_out().to_string()));
        }
        precompose_apply(&self.c, theta)
    }

    /// Applies the materialised oracle to `vec(θ)`.
    pub fn apply_oracle(&self, theta: &HOperator) -> Result<HOperator> {
        let m = self
            .oracle
            .as_ref()
            .ok_or_else(|| Error::Precondition("oracle not materialised".into()))?;
        if theta.shape() != (self.d_y, self.c.d_in()) {
            return Err(Error::shape(
                "apply_oracle",
                format!("{:?}", (self.d_y, self.c.d_in())),
                format!("{:?}", theta.shape()),
            ));
        }
        unvec_op(&(m.matrix() * vec_op(theta)), self.d_y, self.c.d_in())
    }
}

/// Materialises `Cᵀ ⊗ I_{d_Y}` with the default cap.
pub fn precompose_oracle(c: &HOperator, d_y: usize) -> Result<PrecomposeRep> {
    precompose_oracle_capped(c, d_y, DEFAULT_ORACLE_CAP)
}

pub fn precompose_oracle_capped(c: &HOperator, d_y: usize, cap: usize) -> Result<PrecomposeRep> {
    let mut rep = PrecomposeRep::new(c.clone(), d_y)?;
    let dim = c.d_in() * d_y;
    if dim > cap {
        return Err(Error::OracleTooLarge { dim, cap });
    }
    let m = c.matrix().transpose().kronecker(&DMatrix::<f64>::identity(d_y, d_y));
    rep.oracle = Some(HOperator::new(m)?);
    Ok(rep)
}

/// `(⟨A_C[θ1], θ2⟩_HS, ⟨θ1, A_{Cᵀ}[θ2]⟩_HS)`; equal up to round-off.
pub fn precompose_adjoint_check(c: &HOperator, theta1: &HOperator, theta2: &HOperator) -> Result<(f64, f64)> {
    let lhs = hs_inner(&precompose_apply(c, theta1)?, theta2)?;
    let rhs = hs_inner(theta1, &precompose_apply(&c.transpose(), theta2)?)?;
    Ok((lhs, rhs))
}

/// Minimal-norm solution `θ⋆ = C_YX C_XX†` of `θ C_XX = C_YX`.
pub fn solve_pseudo(c_xx: &HOperator, c_yx: &HOperator, tol: f64) -> Result<HOperator> {
    check_cov_pair("solve_pseudo", c_xx, c_yx)?;
    c_yx.compose(&pseudoinverse(c_xx, tol)?)
}

/// Diagnostics for the existence of a bounded solution of `θ C_XX = C_YX`.
#[derive(Clone, Debug)]
pub struct ExistenceReport {
    /// `range(C_XY) ⊆ range(C_XX)` at the rank tolerance.
    pub range_inclusion: bool,
    /// `sup_x ‖C_YX x‖ / ‖C_XX x‖` over `ker(C_XX)^⊥`, i.e. `‖C_YX C_XX†‖_op`.
    pub sup_ratio_opnorm: f64,
    /// `‖θ⋆‖²_HS`, or `+∞` when no solution exists.
    pub hs_norm_sq: f64,
    /// Smallest β with `β C_XX² − C_XY C_YX ⪰ 0`.
    pub douglas_beta: Option<f64>,
    pub theta_star: Option<HOperator>,
    /// `‖θ C_XX − C_YX‖_HS` for `θ = C_YX C_XX†`.
    pub residual_hs: f64,
}

pub fn douglas_check(c_xx: &HOperator, c_yx: &HOperator, tol: f64) -> Result<ExistenceReport> {
    check_cov_pair("douglas_check", c_xx, c_yx)?;
    let d = c_xx.d_in();
    let c_xy = c_yx.transpose();

    let mut augmented = DMatrix::zeros(d, d + c_xy.d_in());
    augmented.columns_mut(0, d).copy_from(c_xx.matrix());
    augmented.columns_mut(d, c_xy.d_in()).copy_from(c_xy.matrix());
    let aug_sv = augmented.singular_values();
    let cut = tol * aug_sv.max();
    let aug_rank = aug_sv.iter().filter(|&&s| s > cut).count();
    let base_rank = c_xx.matrix().singular_values().iter().filter(|&&s| s > cut).count();
    let range_inclusion = aug_rank == base_rank;

    let candidate = solve_pseudo(c_xx, c_yx, tol)?;
    let residual_hs = candidate.compose(c_xx)?.sub(c_yx)?.hs_norm();
    let sup_ratio_opnorm = candidate.op_norm();

    if !range_inclusion {
        return Ok(ExistenceReport {
            range_inclusion,
            sup_ratio_opnorm,
            hs_norm_sq: f64::INFINITY,
            douglas_beta: None,
            theta_star: None,
            residual_hs,
        });
    }

    let gram = candidate.transpose().compose(&candidate)?;
    let beta = eig_sym(&gram)?.max_eigenvalue().max(0.0);
    let hs = candidate.hs_norm();
    Ok(ExistenceReport {
        range_inclusion,
        sup_ratio_opnorm,
        hs_norm_sq: hs * hs,
        douglas_beta: Some(beta),
        theta_star: Some(candidate),
        residual_hs,
    })
}

/// `‖C_YX (C_XX^{ν+1})†‖²_HS`, the smallest `R²` with `θ⋆ ∈ Ω(ν, R)`;
/// `+∞` when `C_YX` has mass on `ker(C_XX)`.
pub fn source_condition_value(c_xx: &HOperator, c_yx: &HOperator, nu: f64, tol: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be >= 0, got {nu}")));
    }
    check_cov_pair("source_condition_value", c_xx, c_yx)?;
    let eig = eig_sym(c_xx)?;
    let values = eig.psd_eigenvalues()?;
    let cutoff = tol * values.max();
    let v = eig.eigenvectors();
    // coordinates of C_YX in the eigenbasis of C_XX
    let rotated = c_yx.matrix() * v;
    let scale = c_yx.hs_norm();
    let mut total = 0.0;
    for (j, &lambda) in values.iter().enumerate() {
        let col_sq = rotated.column(j).norm_squared();
        if lambda <= cutoff {
            if col_sq.sqrt() > tol.sqrt() * scale.max(f64::MIN_POSITIVE) && col_sq > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        total += col_sq / lambda.powf(2.0 * (nu + 1.0));
    }
    Ok(total)
}

fn check_cov_pair(op: &'static str, c_xx: &HOperator, c_yx: &HOperator) -> Result<()> {
    if !c_xx.is_square() {
        return Err(Error::NonSquare {
            op,
            rows: c_xx.d_out(),
            cols: c_xx.d_in(),
        });
    }
    if c_yx.d_in() != c_xx.d_in() {
        return Err(Error::shape(op, format!("C_YX with {} columns", c_xx.d_in()), c_yx.d_in().to_string()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{outer, HVector, DEFAULT_RANK_TOL};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_op(rng: &mut ChaCha8Rng, r: usize, c: usize) -> HOperator {
        HOperator::new(DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))).unwrap()
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let theta = random_op(&mut rng, 2, 3);
        assert_eq!(precompose_apply(&HOperator::identity(3), &theta).unwrap(), theta);

        let c = random_op(&mut rng, 3, 3);
        let out = precompose_apply(&c, &theta).unwrap();
        let mut oracle = DMatrix::zeros(2, 3);
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..3 {
                    oracle[(i, j)] += theta.matrix()[(i, k)] * c.matrix()[(k, j)];
                }
            }
        }
        assert_abs_diff_eq!(out.matrix(), &oracle, epsilon = 1e-14);

        let y = HVector::from_slice(&[1.0, -2.0]).unwrap();
        let x = HVector::from_slice(&[0.5, 0.1, 3.0]).unwrap();
        let lhs = precompose_apply(&c, &outer(&y, &x)).unwrap();
        let rhs = outer(&y, &c.transpose().apply(&x).unwrap());
        assert_abs_diff_eq!(lhs.matrix(), rhs.matrix(), epsilon = 1e-14);

        assert!(matches!(
            precompose_apply(&c, &random_op(&mut rng, 2, 2)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        let rep = precompose_oracle(&HOperator::from_diagonal(&[2.0, 1.0]).unwrap(), 3).unwrap();
        let mut eig: Vec<f64> = eig_sym(rep.oracle().unwrap()).unwrap().eigenvalues().iter().copied().collect();
        eig.iter_mut().for_each(|v| *v = (*v * 1e12).round() / 1e12);
        assert_eq!(eig, vec![2.0, 2.0, 2.0, 1.0, 1.0, 1.0]);

        let rep = precompose_oracle(&HOperator::identity(3), 4).unwrap();
        assert_eq!(rep.oracle().unwrap(), &HOperator::identity(12));

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_op(&mut rng, 4, 4);
        let rep = precompose_oracle(&c, 3).unwrap();
        let theta = random_op(&mut rng, 3, 4);
        let via_oracle = rep.apply_oracle(&theta).unwrap();
        let direct = rep.apply(&theta).unwrap();
        assert!(via_oracle.sub(&direct).unwrap().hs_norm() <= 1e-10);
    }

    #[test]
    fn oracle_cap_refuses() {
        let c = HOperator::identity(10);
        assert!(matches!(
            precompose_oracle_capped(&c, 10, 99),
            Err(Error::OracleTooLarge { dim: 100, cap: 99 })
        ));
    }

    #[test]
    fn adjoint_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_op(&mut rng, 3, 3);
        let sym = a.add(&a.transpose()).unwrap();
        let t1 = random_op(&mut rng, 2, 3);
        let t2 = random_op(&mut rng, 2, 3);
        let (l, r) = precompose_adjoint_check(&sym, &t1, &t2).unwrap();
        assert_abs_diff_eq!(l, r, epsilon = 1e-10);
        // self-adjointness: A_C appears on the other argument unchanged
        let swapped = hs_inner(&t1, &precompose_apply(&sym, &t2).unwrap()).unwrap();
        assert_abs_diff_eq!(l, swapped, epsilon = 1e-10);

        let (l, r) = precompose_adjoint_check(&a, &HOperator::zeros(2, 3), &t2).unwrap();
        assert_eq!((l, r), (0.0, 0.0));

        let (l, r) = precompose_adjoint_check(&a, &t1, &t2).unwrap();
        // trace(Cᵀ θ1ᵀ θ2) = trace(θ1ᵀ θ2 Cᵀ)
        let oracle = (a.transpose().matrix() * t1.matrix().transpose() * t2.matrix()).trace();
        assert_abs_diff_eq!(l, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(r, oracle, epsilon = 1e-12);
    }

    #[test]
    fn solve_pseudo_examples() {
        let cxx = HOperator::from_diagonal(&[1.0, 0.5, 0.0]).unwrap();
        let cyx = HOperator::from_row_slice(1, 3, &[1.0, 1.0, 0.0]).unwrap();
        let theta = solve_pseudo(&cxx, &cyx, DEFAULT_RANK_TOL).unwrap();
        assert_abs_diff_eq!(theta.matrix(), &DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 0.0]), epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = random_op(&mut rng, 3, 3);
        let cxx = HOperator::new(a.matrix() * a.matrix().transpose() + DMatrix::identity(3, 3)).unwrap();
        let cyx = random_op(&mut rng, 2, 3);
        let inv = cxx.matrix().clone().try_inverse().unwrap();
        let theta = solve_pseudo(&cxx, &cyx, DEFAULT_RANK_TOL).unwrap();
        assert_abs_diff_eq!(theta.matrix(), &(cyx.matrix() * inv), epsilon = 1e-10);
    }

    #[test]
    fn solve_pseudo_flags_unsolvable() {
        let cxx = HOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let cyx = HOperator::from_row_slice(1, 2, &[0.0, 1.0]).unwrap();
        let theta = solve_pseudo(&cxx, &cyx, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(theta, HOperator::zeros(1, 2));
        let residual = theta.compose(&cxx).unwrap().sub(&cyx).unwrap().hs_norm();
        assert!(residual > 0.5);
        // every θ = [a, b] gives θ C_XX = [a, 0], so the second entry is never matched
        for a in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            for b in [-2.0, 0.0, 2.0] {
                let t = HOperator::from_row_slice(1, 2, &[a, b]).unwrap();
                let r = t.compose(&cxx).unwrap().sub(&cyx).unwrap().hs_norm();
                assert!(r >= 1.0 - 1e-15);
            }
        }
    }

    #[test]
    fn douglas_examples() {
        let cxx = HOperator::from_diagonal(&[1.0, 0.5]).unwrap();
        let cyx = HOperator::from_row_slice(1, 2, &[1.0, 1.0]).unwrap();
        let rep = douglas_check(&cxx, &cyx, DEFAULT_RANK_TOL).unwrap();
        assert!(rep.range_inclusion);
        // θ⋆ = [1, 2]: ‖θ⋆‖_op = √5, ‖θ⋆‖²_HS = 5, β = ‖θ⋆‖²_op = 5
        assert_abs_diff_eq!(rep.sup_ratio_opnorm, 5.0_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(rep.hs_norm_sq, 5.0, epsilon = 1e-12);
        let beta = rep.douglas_beta.unwrap();
        assert_abs_diff_eq!(beta, 5.0, epsilon = 1e-12);
        // β C_XX² − C_XY C_YX is PSD at β and indefinite just below it
        let c2 = cxx.compose(&cxx).unwrap();
        let cc = cyx.transpose().compose(&cyx).unwrap();
        let at = c2.scale(beta).sub(&cc).unwrap();
        assert!(eig_sym(&at).unwrap().min_eigenvalue() >= -1e-12);
        let below = c2.scale(beta - 1e-3).sub(&cc).unwrap();
        assert!(eig_sym(&below).unwrap().min_eigenvalue() < 0.0);

        let cxx = HOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let cyx = HOperator::from_row_slice(1, 2, &[0.0, 1.0]).unwrap();
        let rep = douglas_check(&cxx, &cyx, DEFAULT_RANK_TOL).unwrap();
        assert!(!rep.range_inclusion);
        assert!(rep.hs_norm_sq.is_infinite());
        assert!(rep.theta_star.is_none());
        assert!(rep.douglas_beta.is_none());
        assert!(rep.residual_hs > 0.5);

        let rep = douglas_check(&HOperator::from_diagonal(&[1.0, 0.5]).unwrap(), &HOperator::zeros(2, 2), DEFAULT_RANK_TOL)
            .unwrap();
        assert!(rep.range_inclusion);
        assert_eq!(rep.sup_ratio_opnorm, 0.0);
        assert_eq!(rep.hs_norm_sq, 0.0);
        assert_eq!(rep.douglas_beta, Some(0.0));
    }

    #[test]
    fn source_condition_examples() {
        let cxx = HOperator::from_diagonal(&[1.0, 0.25]).unwrap();
        let cyx = HOperator::from_row_slice(1, 2, &[1.0, 0.25_f64.powf(1.5)]).unwrap();
        let v = source_condition_value(&cxx, &cyx, 0.5, DEFAULT_RANK_TOL).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
        assert_eq!(source_condition_value(&cxx, &HOperator::zeros(3, 2), 0.5, DEFAULT_RANK_TOL).unwrap(), 0.0);

        let singular = HOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let off_range = HOperator::from_row_slice(1, 2, &[0.0, 1.0]).unwrap();
        assert!(source_condition_value(&singular, &off_range, 1.0, DEFAULT_RANK_TOL)
            .unwrap()
            .is_infinite());
    }
}
