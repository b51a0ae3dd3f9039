//! Finite truncations of separable Hilbert spaces.
//!
//! Elements are coefficient vectors in a fixed (implicit) orthonormal basis,
//! bounded operators are dense matrices acting on those coefficients. All
//! operators here are real, so adjoints are transposes.

use std::fmt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative singular-value cutoff for pseudoinversion and rank tests.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Maximum entrywise asymmetry tolerated before an operator is symmetrised.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Element of a truncated Hilbert space.
#[derive(Clone, Debug, PartialEq)]
pub struct HVector(DVector<f64>);

impl HVector {
    pub fn new(coeffs: DVector<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("vector dimension must be >= 1".into()));
        }
        if coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("HVector"));
        }
        Ok(Self(coeffs))
    }

    pub fn from_slice(coeffs: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(coeffs))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    /// The `index`-th basis vector `e_index` (zero-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[index] = 1.0;
        Self(v)
    }

    pub(crate) fn wrap(coeffs: DVector<f64>) -> Self {
        Self(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }

    pub fn inner(&self, other: &HVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::shape("inner", self.dim().to_string(), other.dim().to_string()));
        }
        Ok(self.0.dot(&other.0))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }
}

/// Bounded operator between two truncated Hilbert spaces, `d_out x d_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct HOperator(DMatrix<f64>);

impl HOperator {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidParameter("operator dimensions must be >= 1".into()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("HOperator"));
        }
        Ok(Self(entries))
    }

    pub(crate) fn wrap(entries: DMatrix<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Self(entries)
    }

    pub fn zeros(d_out: usize, d_in: usize) -> Self {
        Self(DMatrix::zeros(d_out, d_in))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    /// Builds an operator from row-major entries.
    pub fn from_row_slice(d_out: usize, d_in: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != d_out * d_in {
            return Err(Error::shape(
                "from_row_slice",
                format!("{} entries", d_out * d_in),
                format!("{} entries", entries.len()),
            ));
        }
        Self::new(DMatrix::from_row_slice(d_out, d_in, entries))
    }

    pub fn d_in(&self) -> usize {
        self.0.ncols()
    }

    pub fn d_out(&self) -> usize {
        self.0.nrows()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> HOperator {
        Self(self.0.transpose())
    }

    pub fn is_square(&self) -> bool {
        self.0.is_square()
    }

    /// `self ∘ other`, i.e. the matrix product `self * other`.
    pub fn compose(&self, other: &HOperator) -> Result<HOperator> {
        if self.d_in() != other.d_out() {
            return Err(Error::shape(
                "compose",
                format!("inner dimension {}", self.d_in()),
                format!("{}", other.d_out()),
            ));
        }
        Ok(Self(&self.0 * &other.0))
    }

    pub fn apply(&self, v: &HVector) -> Result<HVector> {
        if self.d_in() != v.dim() {
            return Err(Error::shape("apply", self.d_in().to_string(), v.dim().to_string()));
        }
        Ok(HVector(&self.0 * &v.0))
    }

    pub fn add(&self, other: &HOperator) -> Result<HOperator> {
        self.check_same_shape("add", other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &HOperator) -> Result<HOperator> {
        self.check_same_shape("sub", other)?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, factor: f64) -> HOperator {
        Self(&self.0 * factor)
    }

    pub fn hs_norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn op_norm(&self) -> f64 {
        schatten_norm(self, SchattenP::Inf)
    }

    /// Largest absolute entry of `self - selfᵀ`; `None` for non-square operators.
    pub fn asymmetry(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let m = &self.0;
        let n = m.nrows();
        let mut worst = 0.0_f64;
        for j in 0..n {
            for i in (j + 1)..n {
                worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        Some(worst)
    }

    pub fn symmetrized(&self) -> Result<HOperator> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                op: "symmetrized",
                rows: self.d_out(),
                cols: self.d_in(),
            });
        }
        Ok(Self((&self.0 + self.0.transpose()) * 0.5))
    }

    /// Numerical rank at relative singular-value cutoff `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        let sv = self.0.singular_values();
        let smax = sv.max();
        if smax <= 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > tol * smax).count()
    }

    fn check_same_shape(&self, op: &'static str, other: &HOperator) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::shape(
                op,
                format!("{:?}", self.shape()),
                format!("{:?}", other.shape()),
            ));
        }
        Ok(())
    }
}

impl fmt::Display for HOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Schatten exponent; only the trace, Hilbert–Schmidt and operator norms are supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchattenP {
    One,
    Two,
    Inf,
}

/// Rank-one operator `y ⊗ x : v ↦ ⟨x, v⟩ y`.
pub fn outer(y: &HVector, x: &HVector) -> HOperator {
    HOperator(&y.0 * x.0.transpose())
}

/// Hilbert–Schmidt inner product `trace(Aᵀ B)`.
pub fn hs_inner(a: &HOperator, b: &HOperator) -> Result<f64> {
    a.check_same_shape("hs_inner", b)?;
    Ok(a.0.dot(&b.0))
}

/// ℓ^p norm of the singular values.
pub fn schatten_norm(a: &HOperator, p: SchattenP) -> f64 {
    match p {
        SchattenP::Two => a.0.norm(),
        SchattenP::One => a.0.singular_values().iter().sum(),
        SchattenP::Inf => a.0.singular_values().max().max(0.0),
    }
}

/// `(1/n) Σ y_i ⊗ x_i` for sample rows `xs` (n x d_x) and `ys` (n x d_y).
pub fn empirical_cov(xs: &DMatrix<f64>, ys: &DMatrix<f64>) -> Result<HOperator> {
    let n = xs.nrows();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if ys.nrows() != n {
        return Err(Error::shape("empirical_cov", format!("{n} rows"), format!("{} rows", ys.nrows())));
    }
    let mut cov = ys.transpose() * xs;
    cov /= n as f64;
    Ok(HOperator(cov))
}

/// Eigendecomposition of a symmetric operator, eigenvalues in descending order.
#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    source_dim: usize,
}

impl SpectralDecomp {
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, aligned with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn reconstruct(&self) -> HOperator {
        self.map_eigenvalues(|l| l)
    }

    /// `V diag(values) Vᵀ` for caller-supplied spectral values.
    pub(crate) fn synthesize(&self, values: &DVector<f64>) -> HOperator {
        let mut scaled = self.eigenvectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= values[j];
        }
        HOperator(scaled * self.eigenvectors.transpose())
    }

    fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> HOperator {
        self.synthesize(&self.eigenvalues.map(f))
    }

    /// Functional calculus `f(C) = V f(Λ) Vᵀ` on a positive semidefinite
    /// decomposition. Round-off negatives are clamped to zero.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> Result<HOperator> {
        let values = self.psd_eigenvalues()?;
        let mut out = DVector::zeros(values.len());
        for (i, &lambda) in values.iter().enumerate() {
            let v = f(lambda);
            if !v.is_finite() {
                return Err(Error::SpectralFnUndefined { lambda });
            }
            out[i] = v;
        }
        Ok(self.synthesize(&out))
    }

    /// As [`Self::apply`], but eigenvalues `<= cutoff` are mapped to zero
    /// instead of being passed to `f`.
    pub fn apply_with_cutoff(&self, f: impl Fn(f64) -> f64, cutoff: f64) -> Result<HOperator> {
        self.apply(|lambda| if lambda <= cutoff { 0.0 } else { f(lambda) })
    }

    /// Eigenvalues with round-off negatives clamped; rejects genuinely indefinite input.
    pub fn psd_eigenvalues(&self) -> Result<DVector<f64>> {
        let scale = 1.0 + self.max_eigenvalue().abs();
        let floor = -1e-10 * scale;
        let mut values = self.eigenvalues.clone();
        for v in values.iter_mut() {
            if *v < floor {
                return Err(Error::NotPositiveSemidefinite { eigenvalue: *v });
            }
            *v = v.max(0.0);
        }
        Ok(values)
    }
}

/// Symmetric eigendecomposition. Inputs are symmetrised after an asymmetry guard.
pub fn eig_sym(c: &HOperator) -> Result<SpectralDecomp> {
    let asym = c.asymmetry().ok_or(Error::NonSquare {
        op: "eig_sym",
        rows: c.d_out(),
        cols: c.d_in(),
    })?;
    let scale = 1.0 + c.0.amax();
    let tolerance = SYMMETRY_TOL * scale;
    if asym > tolerance {
        return Err(Error::NotSymmetric { asymmetry: asym, tolerance });
    }
    let sym = (&c.0 + c.0.transpose()) * 0.5;
    let d = sym.nrows();
    let eig = SymmetricEigen::new(sym);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = DVector::from_iterator(d, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomp {
        eigenvalues,
        eigenvectors,
        source_dim: d,
    })
}

/// `f(C)` for symmetric positive semidefinite `C`.
pub fn apply_spectral_fn(c: &HOperator, f: impl Fn(f64) -> f64) -> Result<HOperator> {
    eig_sym(c)?.apply(f)
}

/// `f(C)` with eigenvalues at or below `cutoff` sent to zero.
pub fn apply_spectral_fn_with_cutoff(c: &HOperator, f: impl Fn(f64) -> f64, cutoff: f64) -> Result<HOperator> {
    eig_sym(c)?.apply_with_cutoff(f, cutoff)
}

/// Moore–Penrose pseudoinverse; singular values below `tol * σ_max` are treated as zero.
pub fn pseudoinverse(a: &HOperator, tol: f64) -> Result<HOperator> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("pseudoinverse tol must be > 0, got {tol}")));
    }
    let svd = a.0.clone().svd(true, true);
    let u = svd.u.as_ref().expect("svd computed with u");
    let v_t = svd.v_t.as_ref().expect("svd computed with v_t");
    let smax = svd.singular_values.max();
    let mut out = DMatrix::zeros(a.d_in(), a.d_out());
    if smax <= 0.0 {
        return Ok(HOperator(out));
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > tol * smax {
            out += (v_t.row(k).transpose() * u.column(k).transpose()) / s;
        }
    }
    Ok(HOperator(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> DMatrix<f64> {
        DMatrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0))
    }

    fn random_psd(rng: &mut ChaCha8Rng, d: usize) -> HOperator {
        let a = random_matrix(rng, d, d);
        HOperator::new(&a * a.transpose()).unwrap()
    }

    #[test]
    fn outer_of_unit_vectors() {
        let y = HVector::from_slice(&[1.0, 0.0]).unwrap();
        let x = HVector::from_slice(&[0.0, 1.0]).unwrap();
        let op = outer(&y, &x);
        assert_eq!(op.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]));
        let zero = outer(&HVector::zeros(2), &x);
        assert_eq!(zero, HOperator::zeros(2, 2));
    }

    #[test]
    fn outer_norms() {
        let y = HVector::from_slice(&[1.0, 2.0]).unwrap();
        let x = HVector::from_slice(&[3.0, 4.0]).unwrap();
        let op = outer(&y, &x);
        // Frobenius: sqrt(9+16+36+64) = sqrt(125)
        let frob = (9.0_f64 + 16.0 + 36.0 + 64.0).sqrt();
        assert_abs_diff_eq!(op.hs_norm(), frob, epsilon = 1e-12);
        assert_abs_diff_eq!(frob, 5.0 * 5.0_f64.sqrt(), epsilon = 1e-12);
        for p in [SchattenP::One, SchattenP::Two, SchattenP::Inf] {
            assert_abs_diff_eq!(schatten_norm(&op, p), x.norm() * y.norm(), epsilon = 1e-12);
        }
    }

    #[test]
    fn hs_inner_examples() {
        let id = HOperator::identity(2);
        assert_eq!(hs_inner(&id, &id).unwrap(), 2.0);
        let e11 = HOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        let e22 = HOperator::from_diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(hs_inner(&e11, &e22).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = HOperator::new(random_matrix(&mut rng, 3, 2)).unwrap();
        let b = HOperator::new(random_matrix(&mut rng, 3, 2)).unwrap();
        let mut oracle = 0.0;
        for i in 0..3 {
            for j in 0..2 {
                oracle += a.matrix()[(i, j)] * b.matrix()[(i, j)];
            }
        }
        assert_abs_diff_eq!(hs_inner(&a, &b).unwrap(), oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(hs_inner(&a, &b).unwrap(), hs_inner(&b, &a).unwrap(), epsilon = 1e-15);
        assert!(matches!(
            hs_inner(&a, &HOperator::identity(2)),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn schatten_of_diagonal() {
        let d = HOperator::from_diagonal(&[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(schatten_norm(&d, SchattenP::One), 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schatten_norm(&d, SchattenP::Two), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schatten_norm(&d, SchattenP::Inf), 4.0, epsilon = 1e-12);
        let z = HOperator::zeros(3, 2);
        for p in [SchattenP::One, SchattenP::Two, SchattenP::Inf] {
            assert_eq!(schatten_norm(&z, p), 0.0);
        }
    }

    #[test]
    fn empirical_cov_examples() {
        let xs = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let ys = DMatrix::from_row_slice(1, 2, &[0.0, 1.0]);
        let c = empirical_cov(&xs, &ys).unwrap();
        assert_eq!(c.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]));

        let x = [0.3, -1.2, 2.0];
        let xs = DMatrix::from_row_slice(2, 3, &[x[0], x[1], x[2], -x[0], -x[1], -x[2]]);
        let c = empirical_cov(&xs, &xs).unwrap();
        let xv = HVector::from_slice(&x).unwrap();
        assert_abs_diff_eq!(c.matrix(), outer(&xv, &xv).matrix(), epsilon = 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs = random_matrix(&mut rng, 3, 4);
        let ys = random_matrix(&mut rng, 3, 2);
        let mut sum = DMatrix::zeros(2, 4);
        for i in 0..3 {
            let y = HVector::new(ys.row(i).transpose()).unwrap();
            let x = HVector::new(xs.row(i).transpose()).unwrap();
            sum += outer(&y, &x).matrix();
        }
        sum /= 3.0;
        assert_abs_diff_eq!(empirical_cov(&xs, &ys).unwrap().matrix(), &sum, epsilon = 1e-14);

        let empty = DMatrix::<f64>::zeros(0, 2);
        assert!(matches!(empirical_cov(&empty, &empty), Err(Error::EmptySample)));
    }

    #[test]
    fn empirical_cov_rank_bounded_by_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs = random_matrix(&mut rng, 3, 7);
        let c = empirical_cov(&xs, &xs).unwrap();
        assert!(c.rank(1e-10) <= 3);
    }

    #[test]
    fn eig_sym_examples() {
        let d = HOperator::from_diagonal(&[1.0, 2.0]).unwrap();
        let e = eig_sym(&d).unwrap();
        assert_eq!(e.eigenvalues().as_slice(), &[2.0, 1.0]);
        assert_abs_diff_eq!(e.eigenvectors().column(0)[1].abs(), 1.0, epsilon = 1e-15);

        let e = eig_sym(&HOperator::identity(4)).unwrap();
        assert!(e.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-15));

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 5, 5);
        let c = HOperator::new(&a + a.transpose()).unwrap();
        let e = eig_sym(&c).unwrap();
        let resid = e.reconstruct().sub(&c).unwrap().hs_norm();
        assert!(resid <= 1e-10 * (1.0 + c.hs_norm()));
        let vtv = e.eigenvectors().transpose() * e.eigenvectors();
        assert_abs_diff_eq!(vtv, DMatrix::identity(5, 5), epsilon = 1e-10);
        let vals = e.eigenvalues();
        assert!(vals.iter().zip(vals.iter().skip(1)).all(|(a, b)| a >= b));
    }

    #[test]
    fn eig_sym_rejects_bad_input() {
        let rect = HOperator::zeros(2, 3);
        assert!(matches!(eig_sym(&rect), Err(Error::NonSquare { .. })));
        let skew = HOperator::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]).unwrap();
        assert!(matches!(eig_sym(&skew), Err(Error::NotSymmetric { .. })));
        // asymmetry under the guard is symmetrised away
        let near = HOperator::from_row_slice(2, 2, &[1.0, 1e-12, 0.0, 1.0]).unwrap();
        assert!(eig_sym(&near).is_ok());
    }

    #[test]
    fn spectral_fn_examples() {
        let d = HOperator::from_diagonal(&[2.0, 1.0]).unwrap();
        assert_abs_diff_eq!(apply_spectral_fn(&d, |l| l).unwrap().matrix(), d.matrix(), epsilon = 1e-15);
        let d = HOperator::from_diagonal(&[4.0, 9.0]).unwrap();
        let s = apply_spectral_fn(&d, f64::sqrt).unwrap();
        assert_abs_diff_eq!(s.matrix(), &DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0])), epsilon = 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let c = random_psd(&mut rng, 4);
        let f = apply_spectral_fn(&c, |l| 1.0 / (0.5 + l)).unwrap();
        let shifted = c.matrix() + DMatrix::identity(4, 4) * 0.5;
        let inv = shifted.lu().solve(&DMatrix::identity(4, 4)).unwrap();
        assert_abs_diff_eq!(f.matrix(), &inv, epsilon = 1e-10);
    }

    #[test]
    fn spectral_fn_undefined_needs_cutoff() {
        let d = HOperator::from_diagonal(&[1.0, 0.0]).unwrap();
        assert!(matches!(
            apply_spectral_fn(&d, |l| 1.0 / l),
            Err(Error::SpectralFnUndefined { .. })
        ));
        let inv = apply_spectral_fn_with_cutoff(&d, |l| 1.0 / l, 1e-12).unwrap();
        assert_abs_diff_eq!(inv.matrix(), d.matrix(), epsilon = 1e-15);
        let indefinite = HOperator::from_diagonal(&[1.0, -1.0]).unwrap();
        assert!(matches!(
            apply_spectral_fn(&indefinite, f64::sqrt),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn pseudoinverse_examples() {
        let d = HOperator::from_diagonal(&[1.0, 0.5, 0.0]).unwrap();
        let p = pseudoinverse(&d, DEFAULT_RANK_TOL).unwrap();
        assert_abs_diff_eq!(
            p.matrix(),
            HOperator::from_diagonal(&[1.0, 2.0, 0.0]).unwrap().matrix(),
            epsilon = 1e-14
        );
        let id = HOperator::identity(3);
        assert_abs_diff_eq!(pseudoinverse(&id, DEFAULT_RANK_TOL).unwrap().matrix(), id.matrix(), epsilon = 1e-14);
    }

    #[test]
    fn pseudoinverse_penrose_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_matrix(&mut rng, 4, 2) * random_matrix(&mut rng, 2, 3);
        let a = HOperator::new(a).unwrap();
        assert_eq!(a.rank(DEFAULT_RANK_TOL), 2);
        let p = pseudoinverse(&a, DEFAULT_RANK_TOL).unwrap();
        let (am, pm) = (a.matrix(), p.matrix());
        assert_abs_diff_eq!(am * pm * am, am.clone(), epsilon = 1e-8);
        assert_abs_diff_eq!(pm * am * pm, pm.clone(), epsilon = 1e-8);
        let ap = am * pm;
        let pa = pm * am;
        assert_abs_diff_eq!(ap.transpose(), ap, epsilon = 1e-8);
        assert_abs_diff_eq!(pa.transpose(), pa, epsilon = 1e-8);
    }
}
