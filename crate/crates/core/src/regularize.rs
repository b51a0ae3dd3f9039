//! Spectral regularisation strategies `g_α` and their residuals `r_α = 1 − λ g_α`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{eig_sym, HOperator, SpectralDecomp};

/// Slack allowed when comparing grid suprema to declared constants.
pub const CONSTANT_SLACK: f64 = 1e-12;

/// Landweber step size used when none is given, relative to `1/‖C‖_op`.
pub const LANDWEBER_DEFAULT_STEP: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum StrategyKind {
    /// `g_α(λ) = 1/(α+λ)`.
    Tikhonov,
    /// `g_α(λ) = 𝟙[λ>α]/λ`.
    Truncation,
    /// `m = ⌈1/α⌉` gradient steps of size `tau`; `tau = None` defers the
    /// choice to `0.9/‖C‖_op` when applied to an operator.
    Landweber { tau: Option<f64> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Qualification {
    Finite(f64),
    Arbitrary,
}

impl Qualification {
    pub fn covers(&self, q: f64) -> bool {
        match *self {
            Qualification::Finite(qmax) => q <= qmax + CONSTANT_SLACK,
            Qualification::Arbitrary => true,
        }
    }
}

impl std::fmt::Display for Qualification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Qualification::Finite(q) => write!(f, "{q}"),
            Qualification::Arbitrary => write!(f, "arbitrary"),
        }
    }
}

/// A regularisation family with its declared constants `D`, `γ0`, `B`
/// and qualification `(q, γ_q)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegStrategy {
    pub kind: StrategyKind,
    pub d: f64,
    pub gamma0: f64,
    pub b: f64,
    pub qualification: Qualification,
    pub gamma_q: f64,
}

impl RegStrategy {
    pub fn tikhonov() -> Self {
        Self {
            kind: StrategyKind::Tikhonov,
            d: 1.0,
            gamma0: 1.0,
            b: 1.0,
            qualification: Qualification::Finite(1.0),
            gamma_q: 1.0,
        }
    }

    pub fn truncation() -> Self {
        Self {
            kind: StrategyKind::Truncation,
            d: 1.0,
            gamma0: 1.0,
            b: 1.0,
            qualification: Qualification::Arbitrary,
            gamma_q: 1.0,
        }
    }

    /// Landweber iteration. On `λ ∈ [0, 1/τ]` and `α ∈ (0, 1]`:
    /// `|λg| ≤ 1`, `|r| ≤ 1` and `|g| ≤ τ⌈1/α⌉ ≤ 2τ/α`. The qualification is
    /// arbitrary with `γ_q = (q/(eτ))^q`, see [`Self::gamma_q_for`].
    pub fn landweber(tau: Option<f64>) -> Self {
        let b = tau.map(|t| 2.0 * t).unwrap_or(f64::NAN);
        Self {
            kind: StrategyKind::Landweber { tau },
            d: 1.0,
            gamma0: 1.0,
            b,
            qualification: Qualification::Arbitrary,
            gamma_q: f64::NAN,
        }
    }

    /// Parses a strategy name as used in study configs.
    pub fn from_name(name: &str, tau: Option<f64>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "tikhonov" | "ridge" => Ok(Self::tikhonov()),
            "truncation" | "pcr" | "spectral_cutoff" => Ok(Self::truncation()),
            "landweber" => Ok(Self::landweber(tau)),
            other => Err(Error::InvalidParameter(format!("unknown strategy '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            StrategyKind::Tikhonov => "tikhonov",
            StrategyKind::Truncation => "truncation",
            StrategyKind::Landweber { .. } => "landweber",
        }
    }

    /// Overrides the declared `(D, γ0, B)`.
    pub fn with_constants(mut self, d: f64, gamma0: f64, b: f64) -> Result<Self> {
        for (name, v) in [("D", d), ("gamma0", gamma0), ("B", b)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        self.d = d;
        self.gamma0 = gamma0;
        self.b = b;
        Ok(self)
    }

    pub fn tau(&self) -> Option<f64> {
        match self.kind {
            StrategyKind::Landweber { tau } => tau,
            _ => None,
        }
    }

    /// Fixes an unresolved Landweber step against the spectrum bound `op_norm`.
    pub fn resolved_for(&self, op_norm: f64) -> Self {
        match self.kind {
            StrategyKind::Landweber { tau: None } => {
                let tau = if op_norm > 0.0 { LANDWEBER_DEFAULT_STEP / op_norm } else { 1.0 };
                let mut s = Self::landweber(Some(tau));
                s.d = self.d;
                s.gamma0 = self.gamma0;
                s
            }
            _ => *self,
        }
    }

    /// Declared `γ_q` for qualification order `q`.
    pub fn gamma_q_for(&self, q: f64) -> Result<f64> {
        match self.kind {
            StrategyKind::Landweber { tau } => {
                let tau = tau.ok_or_else(unresolved_tau)?;
                Ok((q / (std::f64::consts::E * tau)).powf(q))
            }
            _ => Ok(self.gamma_q),
        }
    }

    /// Largest `λ` the declared constants are valid on.
    pub fn stable_lambda_max(&self) -> f64 {
        match self.kind {
            StrategyKind::Landweber { tau: Some(t) } => 1.0 / t,
            _ => f64::INFINITY,
        }
    }
}

fn unresolved_tau() -> Error {
    Error::InvalidParameter("landweber step size tau is unresolved".into())
}

fn check_args(alpha: f64, lambda: f64) -> Result<()> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if !(lambda >= 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    Ok(())
}

pub fn landweber_iterations(alpha: f64) -> f64 {
    (1.0 / alpha).ceil()
}

/// `g_α(λ)`.
pub fn g_eval(s: &RegStrategy, alpha: f64, lambda: f64) -> Result<f64> {
    check_args(alpha, lambda)?;
    Ok(match s.kind {
        StrategyKind::Tikhonov => 1.0 / (alpha + lambda),
        StrategyKind::Truncation => {
            if lambda > alpha {
                1.0 / lambda
            } else {
                0.0
            }
        }
        StrategyKind::Landweber { tau } => {
            let tau = tau.ok_or_else(unresolved_tau)?;
            let m = landweber_iterations(alpha);
            if lambda == 0.0 {
                tau * m
            } else {
                // τ Σ_{j<m} (1−τλ)^j = (1 − (1−τλ)^m)/λ
                -(m * (-tau * lambda).ln_1p()).exp_m1() / lambda
            }
        }
    })
}

/// `r_α(λ) = 1 − λ g_α(λ)`.
pub fn residual_eval(s: &RegStrategy, alpha: f64, lambda: f64) -> Result<f64> {
    check_args(alpha, lambda)?;
    Ok(match s.kind {
        StrategyKind::Tikhonov => alpha / (alpha + lambda),
        StrategyKind::Truncation => {
            if lambda > alpha {
                0.0
            } else {
                1.0
            }
        }
        StrategyKind::Landweber { tau } => {
            let tau = tau.ok_or_else(unresolved_tau)?;
            (1.0 - tau * lambda).powf(landweber_iterations(alpha))
        }
    })
}

/// Log-spaced grid of `points` values in `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && points >= 1);
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

/// The default `λ ∈ [1e-8, 10]` grid.
pub fn default_lambda_grid() -> Vec<f64> {
    log_grid(1e-8, 10.0, 400)
}

/// The default `α ∈ [1e-6, 1]` grid.
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-6, 1.0, 400)
}

#[derive(Clone, Debug, Serialize)]
pub struct StrategyCheck {
    pub strategy: &'static str,
    /// `sup |λ g_α(λ)|`, compared to `D`.
    pub sup_lambda_g: f64,
    /// `sup |1 − λ g_α(λ)|`, compared to `γ0`.
    pub sup_residual: f64,
    /// `sup α |g_α(λ)|`, compared to `B`.
    pub sup_alpha_g: f64,
    pub pass_d: bool,
    pub pass_gamma0: bool,
    pub pass_b: bool,
    pub lambdas_evaluated: usize,
}

impl StrategyCheck {
    pub fn passed(&self) -> bool {
        self.pass_d && self.pass_gamma0 && self.pass_b
    }
}

/// Grid suprema for the defining bounds of a regularisation strategy.
/// Landweber grids are clipped to the stable interval `λ ≤ 1/τ`.
pub fn verify_strategy(s: &RegStrategy, alphas: &[f64], lambdas: &[f64]) -> Result<StrategyCheck> {
    let lmax = s.stable_lambda_max();
    let lambdas: Vec<f64> = lambdas.iter().copied().filter(|&l| l <= lmax).collect();
    let (mut sup_lg, mut sup_r, mut sup_ag) = (0.0_f64, 0.0_f64, 0.0_f64);
    for &alpha in alphas {
        for &lambda in &lambdas {
            let g = g_eval(s, alpha, lambda)?;
            sup_lg = sup_lg.max((lambda * g).abs());
            sup_r = sup_r.max((1.0 - lambda * g).abs());
            sup_ag = sup_ag.max((alpha * g).abs());
        }
    }
    Ok(StrategyCheck {
        strategy: s.name(),
        sup_lambda_g: sup_lg,
        sup_residual: sup_r,
        sup_alpha_g: sup_ag,
        pass_d: sup_lg <= s.d + CONSTANT_SLACK,
        pass_gamma0: sup_r <= s.gamma0 + CONSTANT_SLACK,
        pass_b: sup_ag <= s.b + CONSTANT_SLACK,
        lambdas_evaluated: lambdas.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QualificationCheck {
    pub q: f64,
    /// `sup λ^q |r_α(λ)| / α^q` over the grid.
    pub sup_ratio: f64,
    pub declared_gamma_q: f64,
    /// Whether `q` is within the declared qualification.
    pub declared: bool,
    pub passed: bool,
}

pub fn qualification_check(s: &RegStrategy, q: f64, alphas: &[f64], lambdas: &[f64]) -> Result<QualificationCheck> {
    if !(q > 0.0) {
        return Err(Error::InvalidParameter(format!("q must be > 0, got {q}")));
    }
    let lmax = s.stable_lambda_max();
    let mut sup = 0.0_f64;
    for &alpha in alphas {
        for &lambda in lambdas.iter().filter(|&&l| l <= lmax) {
            let r = residual_eval(s, alpha, lambda)?;
            sup = sup.max(lambda.powf(q) * r.abs() / alpha.powf(q));
        }
    }
    let gamma_q = s.gamma_q_for(q)?;
    let declared = s.qualification.covers(q);
    Ok(QualificationCheck {
        q,
        sup_ratio: sup,
        declared_gamma_q: gamma_q,
        declared,
        passed: declared && sup <= gamma_q + CONSTANT_SLACK,
    })
}

/// `g_α(C)` for symmetric PSD `C`.
pub fn regularized_inverse(s: &RegStrategy, alpha: f64, c: &HOperator) -> Result<HOperator> {
    regularized_inverse_decomp(s, alpha, &eig_sym(c)?)
}

/// `g_α(C)` from a precomputed decomposition of `C`.
pub fn regularized_inverse_decomp(s: &RegStrategy, alpha: f64, eig: &SpectralDecomp) -> Result<HOperator> {
    check_args(alpha, 0.0)?;
    let s = s.resolved_for(eig.max_eigenvalue().max(0.0));
    let values = eig.psd_eigenvalues()?;
    let mut g = values.clone();
    for v in g.iter_mut() {
        *v = g_eval(&s, alpha, *v)?;
    }
    Ok(eig.synthesize(&g))
}

/// `r_α(C) = I − C g_α(C)`.
pub fn residual_operator(s: &RegStrategy, alpha: f64, c: &HOperator) -> Result<HOperator> {
    let eig = eig_sym(c)?;
    let s = s.resolved_for(eig.max_eigenvalue().max(0.0));
    let values = eig.psd_eigenvalues()?;
    let mut r = values.clone();
    for v in r.iter_mut() {
        *v = residual_eval(&s, alpha, *v)?;
    }
    Ok(eig.synthesize(&r))
}
