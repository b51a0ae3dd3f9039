//! Synthetic problems with known ground truth.
//!
//! All laws are Gaussian in the eigenbasis of `C_XX`, so second and fourth
//! moments (and therefore risks and misspecification errors) are available
//! in closed form.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::SampleSet;
use crate::hilbert::{eig_sym, HOperator, HVector};

/// Deterministic generator for a seed.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-seed for task `stream` of a run seeded by `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Decay {
    /// `λ_j = scale · j^{−rate}`.
    Polynomial { rate: f64 },
    /// `λ_j = scale · e^{−rate·j}`.
    Exponential { rate: f64 },
}

/// Diagonal covariance with the requested eigenvalue decay (`j = 1..=d`).
pub fn make_covariance(d: usize, decay: Decay, scale: f64) -> Result<HOperator> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::InvalidParameter(format!("scale must be finite and >= 0, got {scale}")));
    }
    let diag: Vec<f64> = match decay {
        Decay::Polynomial { rate } => {
            if rate <= 1.0 {
                log::warn!("polynomial decay rate {rate} <= 1 is not trace class in the untruncated limit");
            }
            (1..=d).map(|j| scale * (j as f64).powf(-rate)).collect()
        }
        Decay::Exponential { rate } => {
            if !(rate > 0.0) {
                return Err(Error::InvalidParameter(format!("exponential rate must be > 0, got {rate}")));
            }
            (1..=d).map(|j| scale * (-rate * j as f64).exp()).collect()
        }
    };
    HOperator::from_diagonal(&diag)
}

/// Hölder source set parameters: `θ⋆ = θ̃ C_XX^ν` with `‖θ̃‖_HS = R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceSpec {
    pub nu: f64,
    pub r: f64,
    pub seed: u64,
}

/// Draws `θ̃` with standard normal entries, rescales to `‖θ̃‖_HS = R` and returns `θ̃ C_XX^ν`.
pub fn make_source_target(c_xx: &HOperator, spec: &SourceSpec, d_y: usize) -> Result<HOperator> {
    if !(spec.nu >= 0.0) || !(spec.r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "source spec needs nu >= 0 and R > 0, got nu={} R={}",
            spec.nu, spec.r
        )));
    }
    let d_x = c_xx.d_in();
    let mut rng = rng_for(spec.seed);
    let raw = DMatrix::from_fn(d_y, d_x, |_, _| rng.sample::<f64, _>(StandardNormal));
    let raw = raw.scale(spec.r / raw.norm());
    let theta_tilde = HOperator::new(raw)?;
    if spec.nu == 0.0 {
        return Ok(theta_tilde);
    }
    let power = eig_sym(c_xx)?.apply(|l| l.powf(spec.nu))?;
    theta_tilde.compose(&power)
}

/// Operator with independent standard normal entries.
pub fn random_operator(d_out: usize, d_in: usize, rng: &mut impl Rng) -> HOperator {
    HOperator::wrap(DMatrix::from_fn(d_out, d_in, |_, _| rng.sample::<f64, _>(StandardNormal)))
}

/// Random symmetric PSD `A Aᵀ / rank` with `A` a `d x rank` Gaussian matrix.
pub fn random_psd(d: usize, rank: usize, rng: &mut impl Rng) -> HOperator {
    let a = DMatrix::from_fn(d, rank, |_, _| rng.sample::<f64, _>(StandardNormal));
    let c = &a * a.transpose() / rank.max(1) as f64;
    HOperator::wrap((&c + c.transpose()) * 0.5)
}

/// Sampler for `N(0, C)`: `x = V diag(√λ) z`.
#[derive(Clone, Debug)]
pub struct GaussianFactor {
    /// `(V diag(√λ))ᵀ`, so that a row of draws maps via `z * factor_t`.
    factor_t: DMatrix<f64>,
    basis: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl GaussianFactor {
    pub fn new(cov: &HOperator) -> Result<Self> {
        let d = cov.d_in();
        let (basis, eigenvalues) = if is_diagonal(cov.matrix()) {
            let diag = cov.matrix().diagonal();
            if let Some(bad) = diag.iter().find(|&&v| v < 0.0) {
                return Err(Error::NotPositiveSemidefinite { eigenvalue: *bad });
            }
            (DMatrix::identity(d, d), diag)
        } else {
            let eig = eig_sym(cov)?;
            (eig.eigenvectors().clone(), eig.psd_eigenvalues()?)
        };
        let mut factor = basis.clone();
        for (j, mut col) in factor.column_iter_mut().enumerate() {
            col *= eigenvalues[j].sqrt();
        }
        Ok(Self {
            factor_t: factor.transpose(),
            basis,
            eigenvalues,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Orthonormal eigenbasis `V` of the covariance (columns).
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn is_zero(&self) -> bool {
        self.eigenvalues.iter().all(|&l| l == 0.0)
    }

    /// `n` independent draws as rows.
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let d = self.dim();
        let z = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        z * &self.factor_t
    }
}

fn is_diagonal(m: &DMatrix<f64>) -> bool {
    m.is_square()
        && m.iter()
            .enumerate()
            .all(|(k, &v)| k % m.nrows() == k / m.nrows() || v == 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Linear,
    QuadraticMisspecified,
    Custom,
}

/// Closed form of `x ↦ E[Y | X = x]`.
#[derive(Clone, Debug)]
pub enum ConditionalMean {
    /// `θ x`.
    Linear(HOperator),
    /// `θ0 x + γ Q ((Vᵀx)² − λ)` with `λ, V` the eigenpairs of `C_XX`.
    Quadratic {
        theta0: HOperator,
        gamma: f64,
        mix: DMatrix<f64>,
        basis: DMatrix<f64>,
        eigenvalues: DVector<f64>,
    },
    /// No closed form available.
    Opaque,
}

/// Ground truth for a synthetic regression problem.
#[derive(Clone, Debug)]
pub struct ModelOracle {
    c_xx: HOperator,
    theta_star: Option<HOperator>,
    conditional_mean: ConditionalMean,
    noise_cov: HOperator,
    kind: ModelKind,
}

impl ModelOracle {
    /// The linear model `Y = θ⋆X + ε` with `ε ~ N(0, noise_cov)` independent of `X`.
    pub fn linear(c_xx: HOperator, theta_star: HOperator, noise_cov: HOperator) -> Result<Self> {
        check_model_shapes(&c_xx, &theta_star, &noise_cov)?;
        Ok(Self {
            c_xx,
            conditional_mean: ConditionalMean::Linear(theta_star.clone()),
            theta_star: Some(theta_star),
            noise_cov,
            kind: ModelKind::Linear,
        })
    }

    /// Isotropic noise variant of [`Self::linear`].
    pub fn linear_isotropic(c_xx: HOperator, theta_star: HOperator, noise_std: f64) -> Result<Self> {
        let d_y = theta_star.d_out();
        let noise = HOperator::identity(d_y).scale(noise_std * noise_std);
        Self::linear(c_xx, theta_star, noise)
    }

    /// A model with no closed-form conditional mean; only the covariance is known.
    pub fn custom(c_xx: HOperator, noise_cov: HOperator) -> Self {
        Self {
            c_xx,
            theta_star: None,
            conditional_mean: ConditionalMean::Opaque,
            noise_cov,
            kind: ModelKind::Custom,
        }
    }

    pub fn c_xx(&self) -> &HOperator {
        &self.c_xx
    }

    pub fn theta_star(&self) -> Option<&HOperator> {
        self.theta_star.as_ref()
    }

    pub fn noise_cov(&self) -> &HOperator {
        &self.noise_cov
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn conditional_mean_form(&self) -> &ConditionalMean {
        &self.conditional_mean
    }

    pub fn d_x(&self) -> usize {
        self.c_xx.d_in()
    }

    pub fn d_y(&self) -> usize {
        self.noise_cov.d_in()
    }

    /// `E[Y | X = x]`.
    pub fn conditional_mean(&self, x: &HVector) -> Result<HVector> {
        match &self.conditional_mean {
            ConditionalMean::Linear(theta) => theta.apply(x),
            ConditionalMean::Quadratic {
                theta0,
                gamma,
                mix,
                basis,
                eigenvalues,
            } => {
                let lin = theta0.apply(x)?;
                let xi = basis.transpose() * x.coeffs();
                let centred = DVector::from_iterator(xi.len(), xi.iter().zip(eigenvalues.iter()).map(|(v, l)| v * v - l));
                Ok(HVector::wrap(lin.into_inner() + (mix * centred) * *gamma))
            }
            ConditionalMean::Opaque => Err(Error::NoClosedForm),
        }
    }

    /// Conditional means for sample rows.
    pub fn conditional_mean_rows(&self, xs: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match &self.conditional_mean {
            ConditionalMean::Linear(theta) => Ok(xs * theta.matrix().transpose()),
            ConditionalMean::Quadratic {
                theta0,
                gamma,
                mix,
                basis,
                eigenvalues,
            } => {
                let mut xi = xs * basis;
                for (j, mut col) in xi.column_iter_mut().enumerate() {
                    col.apply(|v| *v = *v * *v - eigenvalues[j]);
                }
                Ok(xs * theta0.matrix().transpose() + (xi * mix.transpose()) * *gamma)
            }
            ConditionalMean::Opaque => Err(Error::NoClosedForm),
        }
    }

    /// `M⋆ = ‖E[Y|X] − θ⋆X‖_{L²}`.
    pub fn misspecification_error(&self) -> Result<f64> {
        match &self.conditional_mean {
            ConditionalMean::Linear(_) => Ok(0.0),
            ConditionalMean::Quadratic {
                gamma,
                mix,
                eigenvalues,
                ..
            } => {
                // Var(ξ_j²) = 2λ_j² for ξ_j ~ N(0, λ_j), independent across j
                let mut total = 0.0;
                for (j, &l) in eigenvalues.iter().enumerate() {
                    total += mix.column(j).norm_squared() * 2.0 * l * l;
                }
                Ok(gamma.abs() * total.sqrt())
            }
            ConditionalMean::Opaque => Err(Error::NoClosedForm),
        }
    }

    /// `E[(E[Y|X] − θ⋆X) ⊗ X]`; zero whenever `θ⋆` is the best linear predictor.
    pub fn misspecification_cross_moment(&self) -> Result<HOperator> {
        match &self.conditional_mean {
            // odd Gaussian moments vanish, so the quadratic part is uncorrelated with X
            ConditionalMean::Linear(_) | ConditionalMean::Quadratic { .. } => {
                Ok(HOperator::zeros(self.d_y(), self.d_x()))
            }
            ConditionalMean::Opaque => Err(Error::NoClosedForm),
        }
    }

    /// Population `C_YX = E[Y ⊗ X]`.
    pub fn c_yx(&self) -> Result<HOperator> {
        match &self.theta_star {
            Some(theta) => theta.compose(&self.c_xx),
            None => Err(Error::NoClosedForm),
        }
    }
}

fn check_model_shapes(c_xx: &HOperator, theta: &HOperator, noise_cov: &HOperator) -> Result<()> {
    if !c_xx.is_square() || theta.d_in() != c_xx.d_in() {
        return Err(Error::shape(
            "ModelOracle",
            format!("theta with {} columns", c_xx.d_in()),
            format!("{:?}", theta.shape()),
        ));
    }
    if !noise_cov.is_square() || noise_cov.d_in() != theta.d_out() {
        return Err(Error::shape(
            "ModelOracle",
            format!("noise covariance {0}x{0}", theta.d_out()),
            format!("{:?}", noise_cov.shape()),
        ));
    }
    let asym = noise_cov.asymmetry().unwrap_or(0.0);
    if asym > crate::hilbert::SYMMETRY_TOL {
        return Err(Error::NotSymmetric {
            asymmetry: asym,
            tolerance: crate::hilbert::SYMMETRY_TOL,
        });
    }
    Ok(())
}

/// Draws `n` pairs from a linear model, deterministically in `seed`.
pub fn sample_linear_model(model: &ModelOracle, n: usize, seed: u64) -> Result<SampleSet> {
    if model.kind != ModelKind::Linear {
        return Err(Error::Precondition("sample_linear_model requires a linear model".into()));
    }
    let theta = model.theta_star.as_ref().expect("linear models carry theta_star");
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut rng = rng_for(seed);
    let xs = GaussianFactor::new(&model.c_xx)?.sample(n, &mut rng);
    let mut ys = &xs * theta.matrix().transpose();
    let noise = GaussianFactor::new(&model.noise_cov)?;
    if !noise.is_zero() {
        ys += noise.sample(n, &mut rng);
    }
    SampleSet::new(xs, ys)
}

/// Parameters of `Y = θ0 X + γ Q((VᵀX)² − λ) + ε`.
#[derive(Clone, Debug)]
pub struct MisspecifiedSpec {
    pub c_xx: HOperator,
    pub theta0: HOperator,
    pub gamma: f64,
    /// `Q`, of shape `d_Y x d_X`.
    pub mix: DMatrix<f64>,
    pub noise_cov: HOperator,
}

impl MisspecifiedSpec {
    /// Random `θ0` and `Q` with standard normal entries scaled by `1/√d_X`.
    pub fn random(c_xx: HOperator, d_y: usize, gamma: f64, noise_std: f64, seed: u64) -> Result<Self> {
        let d_x = c_xx.d_in();
        let mut rng = rng_for(seed);
        let scale = 1.0 / (d_x as f64).sqrt();
        let theta0 = DMatrix::from_fn(d_y, d_x, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
        let mix = DMatrix::from_fn(d_y, d_x, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
        Ok(Self {
            c_xx,
            theta0: HOperator::new(theta0)?,
            gamma,
            mix,
            noise_cov: HOperator::identity(d_y).scale(noise_std * noise_std),
        })
    }

    pub fn oracle(&self) -> Result<ModelOracle> {
        check_model_shapes(&self.c_xx, &self.theta0, &self.noise_cov)?;
        if self.mix.shape() != self.theta0.shape() {
            return Err(Error::shape(
                "MisspecifiedSpec",
                format!("{:?}", self.theta0.shape()),
                format!("{:?}", self.mix.shape()),
            ));
        }
        let factor = GaussianFactor::new(&self.c_xx)?;
        Ok(ModelOracle {
            c_xx: self.c_xx.clone(),
            theta_star: Some(self.theta0.clone()),
            conditional_mean: ConditionalMean::Quadratic {
                theta0: self.theta0.clone(),
                gamma: self.gamma,
                mix: self.mix.clone(),
                basis: factor.basis().clone(),
                eigenvalues: factor.eigenvalues().clone(),
            },
            noise_cov: self.noise_cov.clone(),
            kind: if self.gamma == 0.0 {
                ModelKind::Linear
            } else {
                ModelKind::QuadraticMisspecified
            },
        })
    }
}

/// Draws `n` pairs from the quadratic misspecified model and returns its oracle.
pub fn sample_misspecified(spec: &MisspecifiedSpec, n: usize, seed: u64) -> Result<(SampleSet, ModelOracle)> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let oracle = spec.oracle()?;
    let mut rng = rng_for(seed);
    let xs = GaussianFactor::new(&spec.c_xx)?.sample(n, &mut rng);
    let mut ys = oracle.conditional_mean_rows(&xs)?;
    let noise = GaussianFactor::new(&spec.noise_cov)?;
    if !noise.is_zero() {
        ys += noise.sample(n, &mut rng);
    }
    Ok((SampleSet::new(xs, ys)?, oracle))
}

/// `max_{p ≤ p_max} (mean ‖x_i‖^p)^{1/p} / p^{exponent}` over integer `p ≥ 1`.
fn orlicz_estimate(norms: &[f64], p_max: usize, exponent: f64) -> f64 {
    let top = norms.iter().copied().fold(0.0_f64, f64::max);
    if norms.is_empty() || top == 0.0 {
        return 0.0;
    }
    let n = norms.len() as f64;
    (1..=p_max)
        .map(|p| {
            let p_f = p as f64;
            let mean = norms.iter().map(|&v| (v / top).powi(p as i32)).sum::<f64>() / n;
            top * mean.powf(1.0 / p_f) / p_f.powf(exponent)
        })
        .fold(0.0, f64::max)
}

fn row_norms(rows: &DMatrix<f64>) -> Vec<f64> {
    rows.row_iter().map(|r| r.norm()).collect()
}

/// Sub-Gaussian norm estimate `sup_p ‖ ‖x‖ ‖_{L^p} / √p` over `p ∈ {1..p_max}`.
pub fn psi2_estimate(rows: &DMatrix<f64>, p_max: usize) -> Result<f64> {
    if p_max < 2 {
        return Err(Error::InvalidParameter(format!("p_max must be >= 2, got {p_max}")));
    }
    Ok(orlicz_estimate(&row_norms(rows), p_max, 0.5))
}

/// Sub-Gaussian estimate from precomputed scalar magnitudes.
pub fn psi2_estimate_scalars(values: &[f64], p_max: usize) -> Result<f64> {
    if p_max < 2 {
        return Err(Error::InvalidParameter(format!("p_max must be >= 2, got {p_max}")));
    }
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    Ok(orlicz_estimate(&abs, p_max, 0.5))
}

/// Sub-exponential norm estimate `sup_p ‖ξ‖_{L^p} / p` for scalar magnitudes.
pub fn psi1_estimate_scalars(values: &[f64], p_max: usize) -> Result<f64> {
    if p_max < 1 {
        return Err(Error::InvalidParameter("p_max must be >= 1".into()));
    }
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    Ok(orlicz_estimate(&abs, p_max, 1.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct TailNormEstimate {
    pub psi2_x: f64,
    pub psi2_y: f64,
    /// `‖θ⋆‖_op ‖X‖²_ψ2 + ‖X‖_ψ2 ‖Y‖_ψ2`.
    pub b_psi2: f64,
    pub p_max: usize,
    pub mc_samples: usize,
}

pub fn tail_norm_estimate(data: &SampleSet, theta_star_op_norm: f64, p_max: usize) -> Result<TailNormEstimate> {
    let psi2_x = psi2_estimate(data.xs(), p_max)?;
    let psi2_y = psi2_estimate(data.ys(), p_max)?;
    Ok(TailNormEstimate {
        psi2_x,
        psi2_y,
        b_psi2: theta_star_op_norm * psi2_x * psi2_x + psi2_x * psi2_y,
        p_max,
        mc_samples: data.n(),
    })
}
