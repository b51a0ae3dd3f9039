//! Study configuration, read from TOML (or JSON by file extension).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::regularize::RegStrategy;
use crate::synthesize::Decay;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    Rate,
    Concentration,
    Properties,
    DemoArh,
    DemoCme,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub nu: f64,
    pub r: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self { nu: 1.0, r: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self {
            name: "tikhonov".into(),
            tau: None,
        }
    }
}

impl StrategyConfig {
    pub fn build(&self) -> Result<RegStrategy> {
        RegStrategy::from_name(&self.name, self.tau)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropsConfig {
    /// Overrides the declared `D` of tikhonov (fault injection).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tikhonov_d: Option<f64>,
    /// Largest Kronecker oracle dimension `d_X·d_Y` that is materialised.
    pub oracle_cap: usize,
    /// Dimensions of the random instances used by the oracle properties.
    pub oracle_d_x: usize,
    pub oracle_d_y: usize,
    pub instances: usize,
}

impl Default for PropsConfig {
    fn default() -> Self {
        Self {
            tikhonov_d: None,
            oracle_cap: crate::precompose::DEFAULT_ORACLE_CAP,
            oracle_d_x: 8,
            oracle_d_y: 5,
            instances: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArhDemoConfig {
    /// CSV trajectory; synthetic when absent. Relative to the config file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<PathBuf>,
    pub order: usize,
    pub d_y: usize,
    /// Operator norm of each simulated block.
    pub op_norm: f64,
    pub len: usize,
    pub burn_in: usize,
    pub noise_std: f64,
    pub alpha: f64,
    /// Fraction of the trajectory held out for forecasting.
    pub test_fraction: f64,
}

impl Default for ArhDemoConfig {
    fn default() -> Self {
        Self {
            trajectory: None,
            order: 1,
            d_y: 5,
            op_norm: 0.6,
            len: 20_000,
            burn_in: 500,
            noise_std: 1.0,
            alpha: 1e-3,
            test_fraction: 0.2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LiftConfig {
    Polynomial { degree: usize },
    RandomFourier { bandwidth: f64, features: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CmeDemoConfig {
    pub lift: LiftConfig,
    /// Training sizes, strictly increasing.
    pub n_grid: Vec<usize>,
    pub test_size: usize,
    pub noise_std: f64,
    pub alpha: f64,
}

impl Default for CmeDemoConfig {
    fn default() -> Self {
        Self {
            lift: LiftConfig::RandomFourier {
                bandwidth: 0.5,
                features: 200,
            },
            n_grid: vec![50, 200, 800, 3200],
            test_size: 2000,
            noise_std: 0.1,
            alpha: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StudyConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub study: Option<StudyKind>,
    pub d_x: usize,
    pub d_y: usize,
    pub decay: Decay,
    pub scale: f64,
    pub source: SourceConfig,
    pub noise_std: f64,
    pub strategy: StrategyConfig,
    /// Primary error weight `s ∈ [0, 1/2]`.
    pub s: f64,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub delta: f64,
    pub seed: u64,
    /// Fixed regularisation parameter replacing the `α_n` schedule.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Allowed distance between fitted and theoretical slope.
    pub slope_tolerance: f64,
    /// Sample size of each concentration trial.
    pub sample_size: usize,
    pub trials: usize,
    pub calibration_samples: usize,
    pub p_max: usize,
    pub plots: bool,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
    pub props: PropsConfig,
    pub arh: ArhDemoConfig,
    pub cme: CmeDemoConfig,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            study: None,
            d_x: 40,
            d_y: 5,
            decay: Decay::Polynomial { rate: 2.0 },
            scale: 1.0,
            source: SourceConfig::default(),
            noise_std: 1.0,
            strategy: StrategyConfig::default(),
            s: 0.0,
            n_grid: (7..=13).map(|k| 1usize << k).collect(),
            replications: 20,
            delta: 0.05,
            seed: 0,
            alpha: None,
            slope_tolerance: 0.15,
            sample_size: 500,
            trials: 500,
            calibration_samples: 20_000,
            p_max: 32,
            plots: false,
            out: None,
            props: PropsConfig::default(),
            arh: ArhDemoConfig::default(),
            cme: CmeDemoConfig::default(),
            base_dir: None,
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn strictly_increasing(v: &[usize]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

impl StudyConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; `.json` files are parsed as JSON, anything else as TOML.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let mut cfg = if is_json {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        check(self.d_x >= 1 && self.d_y >= 1, || "d_x and d_y must be >= 1".into())?;
        check(self.scale.is_finite() && self.scale >= 0.0, || format!("scale must be finite and >= 0, got {}", self.scale))?;
        check(self.source.nu > 0.0 && self.source.r > 0.0, || {
            format!("source needs nu > 0 and r > 0, got nu={} r={}", self.source.nu, self.source.r)
        })?;
        check(self.noise_std >= 0.0, || format!("noise_std must be >= 0, got {}", self.noise_std))?;
        check((0.0..=0.5).contains(&self.s), || format!("s must lie in [0, 0.5], got {}", self.s))?;
        check(!self.n_grid.is_empty() && self.n_grid[0] >= 1, || "n_grid must be non-empty and positive".into())?;
        check(strictly_increasing(&self.n_grid), || format!("n_grid must be strictly increasing: {:?}", self.n_grid))?;
        check(self.replications >= 1, || "replications must be >= 1".into())?;
        check(self.delta > 0.0 && self.delta <= 0.5, || format!("delta must lie in (0, 1/2], got {}", self.delta))?;
        if let Some(a) = self.alpha {
            check(a > 0.0, || format!("alpha must be > 0, got {a}"))?;
        }
        check(self.slope_tolerance > 0.0, || "slope_tolerance must be > 0".into())?;
        check(self.sample_size >= 1 && self.trials >= 1, || "sample_size and trials must be >= 1".into())?;
        check(self.calibration_samples >= 1, || "calibration_samples must be >= 1".into())?;
        check(self.p_max >= 2, || format!("p_max must be >= 2, got {}", self.p_max))?;
        self.strategy.build()?;
        let arh = &self.arh;
        check(arh.order >= 1 && arh.d_y >= 1, || "arh.order and arh.d_y must be >= 1".into())?;
        check(arh.alpha > 0.0 && arh.noise_std >= 0.0 && arh.op_norm >= 0.0, || "arh parameters out of range".into())?;
        check(arh.test_fraction > 0.0 && arh.test_fraction < 1.0, || "arh.test_fraction must lie in (0, 1)".into())?;
        let cme = &self.cme;
        check(!cme.n_grid.is_empty() && strictly_increasing(&cme.n_grid), || "cme.n_grid must be strictly increasing".into())?;
        check(cme.test_size >= 1 && cme.alpha > 0.0 && cme.noise_std >= 0.0, || "cme parameters out of range".into())?;
        Ok(())
    }

    /// Hex prefix of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serialises");
        hex::encode(Sha256::digest(&canonical))[..16].to_string()
    }

    pub fn strategy(&self) -> Result<RegStrategy> {
        self.strategy.build()
    }

    pub fn resolve_path(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }
}
