//! Regularised population and empirical solutions, prediction and error measures.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{eig_sym, empirical_cov, HOperator, HVector, DEFAULT_RANK_TOL};
use crate::regularize::{regularized_inverse, regularized_inverse_decomp, RegStrategy};
use crate::synthesize::ModelOracle;

/// Paired samples; row `i` of `xs` and `ys` is the pair `(x_i, y_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet {
    xs: DMatrix<f64>,
    ys: DMatrix<f64>,
}

impl SampleSet {
    pub fn new(xs: DMatrix<f64>, ys: DMatrix<f64>) -> Result<Self> {
        if xs.nrows() == 0 {
            return Err(Error::EmptySample);
        }
        if xs.nrows() != ys.nrows() {
            return Err(Error::shape("SampleSet", format!("{} rows", xs.nrows()), format!("{} rows", ys.nrows())));
        }
        if xs.ncols() == 0 || ys.ncols() == 0 {
            return Err(Error::InvalidParameter("sample dimensions must be >= 1".into()));
        }
        if xs.iter().chain(ys.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("SampleSet"));
        }
        Ok(Self { xs, ys })
    }

    pub fn xs(&self) -> &DMatrix<f64> {
        &self.xs
    }

    pub fn ys(&self) -> &DMatrix<f64> {
        &self.ys
    }

    pub fn n(&self) -> usize {
        self.xs.nrows()
    }

    pub fn d_x(&self) -> usize {
        self.xs.ncols()
    }

    pub fn d_y(&self) -> usize {
        self.ys.ncols()
    }

    /// `Ĉ_XX = (1/n) Σ x_i ⊗ x_i`.
    pub fn cov_xx(&self) -> HOperator {
        empirical_cov(&self.xs, &self.xs).expect("non-empty by construction")
    }

    /// `Ĉ_YX = (1/n) Σ y_i ⊗ x_i`.
    pub fn cov_yx(&self) -> HOperator {
        empirical_cov(&self.xs, &self.ys).expect("non-empty by construction")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FitDiagnostics {
    /// Numerical rank of `Ĉ_XX` at the default tolerance.
    pub rank: usize,
    pub eig_max: f64,
    pub eig_min: f64,
    pub trace: f64,
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub theta_hat: HOperator,
    pub alpha: f64,
    pub strategy: RegStrategy,
    pub diagnostics: FitDiagnostics,
}

impl FitResult {
    pub fn predict(&self, x: &HVector) -> Result<HVector> {
        predict(&self.theta_hat, x)
    }
}

/// `θ_α = C_YX g_α(C_XX)`.
pub fn population_reg_solution(c_xx: &HOperator, c_yx: &HOperator, s: &RegStrategy, alpha: f64) -> Result<HOperator> {
    if c_yx.d_in() != c_xx.d_in() {
        return Err(Error::shape(
            "population_reg_solution",
            format!("C_YX with {} columns", c_xx.d_in()),
            c_yx.d_in().to_string(),
        ));
    }
    c_yx.compose(&regularized_inverse(s, alpha, c_xx)?)
}

/// `θ̂_α = Ĉ_YX g_α(Ĉ_XX)`.
pub fn fit(data: &SampleSet, s: &RegStrategy, alpha: f64) -> Result<FitResult> {
    let c_xx = data.cov_xx();
    let c_yx = data.cov_yx();
    let eig = eig_sym(&c_xx)?;
    let g = regularized_inverse_decomp(s, alpha, &eig)?;
    let theta_hat = c_yx.compose(&g)?;
    let values = eig.eigenvalues();
    let cut = DEFAULT_RANK_TOL * values.max().max(0.0);
    Ok(FitResult {
        theta_hat,
        alpha,
        strategy: s.resolved_for(eig.max_eigenvalue().max(0.0)),
        diagnostics: FitDiagnostics {
            rank: values.iter().filter(|&&l| l > cut).count(),
            eig_max: eig.max_eigenvalue(),
            eig_min: eig.min_eigenvalue(),
            trace: values.sum(),
        },
    })
}

pub fn predict(theta: &HOperator, x: &HVector) -> Result<HVector> {
    theta.apply(x)
}

/// `‖(θ⋆ − θ̂) C_XX^s‖_HS` for `s ∈ [0, 1/2]`.
pub fn weighted_error(theta_hat: &HOperator, theta_star: &HOperator, c_xx: &HOperator, s: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&s) {
        return Err(Error::InvalidParameter(format!("weight s must lie in [0, 0.5], got {s}")));
    }
    let delta = theta_star.sub(theta_hat)?;
    if s == 0.0 {
        return Ok(delta.hs_norm());
    }
    let weight = eig_sym(c_xx)?.apply(|l| l.powf(s))?;
    Ok(delta.compose(&weight)?.hs_norm())
}

/// `R(θ) − R(θ⋆)`, evaluated from the model's closed-form second moments.
pub fn excess_risk(theta: &HOperator, model: &ModelOracle) -> Result<f64> {
    let theta_star = model.theta_star().ok_or(Error::NoClosedForm)?;
    let cross = model.misspecification_cross_moment()?;
    let delta = theta.sub(theta_star)?;
    let sqrt_c = eig_sym(model.c_xx())?.apply(f64::sqrt)?;
    let weighted = delta.compose(&sqrt_c)?.hs_norm();
    // E‖m(X) − θX‖² − E‖m(X) − θ⋆X‖² = ‖Δ C^{1/2}‖² − 2⟨Δ, E[(m(X) − θ⋆X) ⊗ X]⟩
    let cross_term = crate::hilbert::hs_inner(&delta, &cross)?;
    Ok(weighted * weighted - 2.0 * cross_term)
}

/// `α_n = n^{−1/(2(ν+1))}`.
pub fn alpha_schedule(n: usize, nu: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if !(nu > 0.0) {
        return Err(Error::InvalidParameter(format!("nu must be > 0, got {nu}")));
    }
    Ok((n as f64).powf(-1.0 / (2.0 * (nu + 1.0))))
}
