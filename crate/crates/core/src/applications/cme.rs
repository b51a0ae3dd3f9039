//! Vector-valued kernel regression through explicit feature lifts.
//!
//! Raw inputs `ξ` are mapped to features `φ(ξ)` and the ordinary operator
//! estimator is run on `(φ(ξ_i), y_i)`. The fitted `θ̂ φ(·)` estimates the
//! conditional mean `E[Y | ξ = ·]`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::estimate::{fit, FitResult, SampleSet};
use crate::hilbert::HVector;
use crate::regularize::RegStrategy;
use crate::synthesize::rng_for;

#[derive(Clone, Debug, PartialEq)]
pub enum LiftKind {
    Identity,
    /// All monomials of total degree `<= degree`, constant term first.
    Polynomial { degree: usize },
    /// `√(2/D) cos(wᵀξ + b)` with `w ~ N(0, I/bandwidth²)`, `b ~ U[0, 2π)`.
    RandomFourier { bandwidth: f64, features: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct FeatureLift {
    kind: LiftKind,
    input_dim: usize,
    exponents: Vec<Vec<u32>>,
    weights: DMatrix<f64>,
    phases: Vec<f64>,
}

impl FeatureLift {
    pub fn identity(input_dim: usize) -> Self {
        Self {
            kind: LiftKind::Identity,
            input_dim,
            exponents: Vec::new(),
            weights: DMatrix::zeros(0, 0),
            phases: Vec::new(),
        }
    }

    pub fn polynomial(input_dim: usize, degree: usize) -> Self {
        let mut exponents = Vec::new();
        for total in 0..=degree as u32 {
            push_compositions(input_dim, total, &mut Vec::new(), &mut exponents);
        }
        Self {
            kind: LiftKind::Polynomial { degree },
            input_dim,
            exponents,
            weights: DMatrix::zeros(0, 0),
            phases: Vec::new(),
        }
    }

    pub fn random_fourier(input_dim: usize, features: usize, bandwidth: f64, seed: u64) -> Result<Self> {
        if !(bandwidth > 0.0) || features == 0 {
            return Err(Error::InvalidParameter(
                "random Fourier features need bandwidth > 0 and at least one feature".into(),
            ));
        }
        let mut rng = rng_for(seed);
        let weights = DMatrix::from_fn(features, input_dim, |_, _| rng.sample::<f64, _>(StandardNormal) / bandwidth);
        let phases = (0..features).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        Ok(Self {
            kind: LiftKind::RandomFourier {
                bandwidth,
                features,
                seed,
            },
            input_dim,
            exponents: Vec::new(),
            weights,
            phases,
        })
    }

    pub fn kind(&self) -> &LiftKind {
        &self.kind
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Feature dimension `d_φ`.
    pub fn dim(&self) -> usize {
        match &self.kind {
            LiftKind::Identity => self.input_dim,
            LiftKind::Polynomial { .. } => self.exponents.len(),
            LiftKind::RandomFourier { features, .. } => *features,
        }
    }

    pub fn lift(&self, raw: &[f64]) -> Result<HVector> {
        if raw.len() != self.input_dim {
            return Err(Error::shape("FeatureLift::lift", self.input_dim.to_string(), raw.len().to_string()));
        }
        let mut out = vec![0.0; self.dim()];
        self.lift_into(raw, &mut out);
        HVector::from_slice(&out)
    }

    /// Lifts each row of `raw` (n x input_dim) to a row of features.
    pub fn lift_rows(&self, raw: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if raw.ncols() != self.input_dim {
            return Err(Error::shape("FeatureLift::lift_rows", self.input_dim.to_string(), raw.ncols().to_string()));
        }
        if self.kind == LiftKind::Identity {
            return Ok(raw.clone());
        }
        let mut out = DMatrix::zeros(raw.nrows(), self.dim());
        let mut buf = vec![0.0; self.dim()];
        let mut row = vec![0.0; self.input_dim];
        for i in 0..raw.nrows() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = raw[(i, j)];
            }
            self.lift_into(&row, &mut buf);
            for (j, v) in buf.iter().enumerate() {
                out[(i, j)] = *v;
            }
        }
        Ok(out)
    }

    fn lift_into(&self, raw: &[f64], out: &mut [f64]) {
        match &self.kind {
            LiftKind::Identity => out.copy_from_slice(raw),
            LiftKind::Polynomial { .. } => {
                for (slot, exps) in out.iter_mut().zip(&self.exponents) {
                    *slot = raw.iter().zip(exps).map(|(x, &e)| x.powi(e as i32)).product();
                }
            }
            LiftKind::RandomFourier { features, .. } => {
                let norm = (2.0 / *features as f64).sqrt();
                for (k, slot) in out.iter_mut().enumerate() {
                    let proj: f64 = raw.iter().enumerate().map(|(j, x)| self.weights[(k, j)] * x).sum();
                    *slot = norm * (proj + self.phases[k]).cos();
                }
            }
        }
    }
}

fn push_compositions(slots: usize, total: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() + 1 == slots {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    if slots == 0 {
        return;
    }
    for first in (0..=total).rev() {
        prefix.push(first);
        push_compositions(slots, total - first, prefix, out);
        prefix.pop();
    }
}

/// Fits `θ̂` on lifted inputs `φ(ξ_i)` against outputs `y_i`.
pub fn cme_fit(raw_xs: &DMatrix<f64>, ys: &DMatrix<f64>, lift: &FeatureLift, s: &RegStrategy, alpha: f64) -> Result<FitResult> {
    let features = lift.lift_rows(raw_xs)?;
    fit(&SampleSet::new(features, ys.clone())?, s, alpha)
}

/// `θ̂ φ(ξ)`.
pub fn cme_predict(fit: &FitResult, lift: &FeatureLift, raw_x: &[f64]) -> Result<HVector> {
    fit.theta_hat.apply(&lift.lift(raw_x)?)
}
