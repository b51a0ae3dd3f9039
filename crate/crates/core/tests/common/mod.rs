#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use opreg::synthesize::{random_operator, random_psd, rng_for};
use opreg::HOperator;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_for(seed)
}

pub fn psd(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> HOperator {
    random_psd(d, rank, rng)
}

pub fn gaussian(d_out: usize, d_in: usize, rng: &mut ChaCha8Rng) -> HOperator {
    random_operator(d_out, d_in, rng)
}

pub fn dims(rng: &mut ChaCha8Rng, max_x: usize, max_y: usize) -> (usize, usize) {
    (rng.random_range(1..=max_x), rng.random_range(1..=max_y))
}

/// Eigenvalues sorted descending, straight from nalgebra.
pub fn eigenvalues_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut v: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `f(C)` by eigendecomposition in nalgebra, with `f` applied to every eigenvalue.
pub fn spectral(m: &DMatrix<f64>, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let e = SymmetricEigen::new(sym);
    let d = DMatrix::from_diagonal(&e.eigenvalues.map(f));
    &e.eigenvectors * d * e.eigenvectors.transpose()
}

/// Explicit `Cᵀ ⊗ I_{d_y}`, built entry by entry.
pub fn kronecker_oracle(c: &DMatrix<f64>, d_y: usize) -> DMatrix<f64> {
    let d_x = c.nrows();
    DMatrix::from_fn(d_x * d_y, d_x * d_y, |r, s| {
        let (i, a) = (r / d_y, r % d_y);
        let (j, b) = (s / d_y, s % d_y);
        if a == b {
            c[(j, i)]
        } else {
            0.0
        }
    })
}

/// Column-stacked `vec(θ)`.
pub fn vec_cols(m: &DMatrix<f64>) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_iterator(m.len(), m.iter().copied())
}

/// `Γ(k/2)` for positive integers `k` by the half-integer recursion.
pub fn gamma_half(k: u32) -> f64 {
    let (mut x, mut g) = if k % 2 == 0 { (1.0, 1.0) } else { (0.5, std::f64::consts::PI.sqrt()) };
    while x < k as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

/// `E|Z|^p` for `Z ~ N(0, 1)`.
pub fn gaussian_abs_moment(p: u32) -> f64 {
    2f64.powf(p as f64 / 2.0) * gamma_half(p + 1) / std::f64::consts::PI.sqrt()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn gamma_oracle_sanity() {
    assert!((gamma_half(1) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
    assert!((gamma_half(2) - 1.0).abs() < 1e-15);
    assert!((gamma_half(5) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-14);
    assert!((gaussian_abs_moment(2) - 1.0).abs() < 1e-14);
    assert!((gaussian_abs_moment(4) - 3.0).abs() < 1e-13);
}
