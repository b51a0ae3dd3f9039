//! Learning linear operators between separable Hilbert spaces by spectral
//! regularisation of the precomposition inverse problem `θ C_XX = C_YX`.
//!
//! Spaces are represented by finite orthonormal-basis truncations. The crate
//! covers the forward operator and its spectral identities ([`precompose`]),
//! regularisation strategies ([`regularize`]), regularised estimators and
//! error measures ([`estimate`]), synthetic ground-truth problems
//! ([`synthesize`]), kernel and autoregressive applications
//! ([`applications`]) and a reproducible study harness ([`bench`]).

pub mod applications;
pub mod bench;
pub mod error;
pub mod estimate;
pub mod hilbert;
pub mod precompose;
pub mod regularize;
pub mod synthesize;

pub use error::{Error, Result};
pub use estimate::{fit, FitResult, SampleSet};
pub use hilbert::{HOperator, HVector, SchattenP, SpectralDecomp};
pub use regularize::RegStrategy;
