//! Kernel regression through feature lifts and Hilbertian autoregression.

pub mod arh;
pub mod cme;
pub mod ingest;

pub use arh::{arh_fit, arh_fit_with, arh_forecast, arh_lag_covs, ArhFit, ArhModel, BlockAssembly};
pub use cme::{cme_fit, cme_predict, FeatureLift, LiftKind};
pub use ingest::read_trajectory_csv;
