//! Reproducible study harness: rate and concentration studies, the property
//! suite and application demos, all driven by a [`StudyConfig`].

pub mod conc;
pub mod config;
pub mod demo;
pub mod output;
pub mod props;
pub mod rate;
pub mod stats;

pub use conc::{run_concentration_study, ConcentrationReport};
pub use config::StudyConfig;
pub use demo::{run_demo, DemoKind};
pub use props::{run_property_suite, PropertyReport};
pub use rate::{run_rate_study, RateReport};
