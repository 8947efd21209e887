//! Experiment configuration, read from TOML or JSON files.
//!
//! A config names a domain (builtin key or inline Hermitian matrices), a
//! test function, the exponents to scan, the height grid, and the sampler
//! parameters.  All fields except the domain have defaults, so a minimal
//! config is a single `domain = "heisenberg(1)"` line.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainError, OmegaKind, SiegelSpec};
use crate::form::{Complex64, FormError, HermitianForm};
use crate::hardy::{
    Exponent, HardyError, SamplerConfig, TestFunction, DEFAULT_GLOBAL_SCALES,
    DEFAULT_KERNEL_POWER, DEFAULT_TO_ZERO_SCALES,
};
use crate::registry::{DomainKey, RegistryError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config as TOML: {0}")]
    Toml(String),
    #[error("cannot parse config as JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Builtin key or inline matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainSelector {
    Key(String),
    Inline(InlineDomain),
}

/// An inline domain: Hermitian matrices as `[re, im]` entry pairs plus a
/// base point.  The cone over which it sits is the interior of the cone
/// generated by the form itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineDomain {
    pub matrices: Vec<Vec<Vec<[f64; 2]>>>,
    pub base_point: Vec<f64>,
}

impl DomainSelector {
    /// Builds the domain and a label for reports.
    pub fn build(&self) -> Result<(String, SiegelSpec), ConfigError> {
        match self {
            DomainSelector::Key(key) => {
                let parsed = DomainKey::parse(key)?;
                Ok((parsed.canonical(), parsed.build(None)?))
            }
            DomainSelector::Inline(inline) => {
                let mut mats = Vec::with_capacity(inline.matrices.len());
                for rows in &inline.matrices {
                    let n = rows.len();
                    if rows.iter().any(|r| r.len() != n) {
                        return Err(ConfigError::Invalid(
                            "inline matrices must be square".into(),
                        ));
                    }
                    mats.push(DMatrix::from_fn(n, n, |i, j| {
                        Complex64::new(rows[i][j][0], rows[i][j][1])
                    }));
                }
                let form = HermitianForm::new(mats)?;
                let spec = SiegelSpec::new(
                    form,
                    OmegaKind::ConeInterior,
                    inline.base_point.clone(),
                    None,
                )?;
                Ok(("inline".to_string(), spec))
            }
        }
    }
}

/// Which test function to run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    DualConeKernel {
        #[serde(default = "default_power")]
        power: u32,
        #[serde(default)]
        lambdas: Option<Vec<Vec<f64>>>,
    },
    ScaledControl {
        #[serde(default = "default_power")]
        power: u32,
        strength: f64,
        #[serde(default)]
        direction: Option<Vec<f64>>,
        #[serde(default)]
        lambdas: Option<Vec<Vec<f64>>>,
    },
    Constant { re: f64, im: f64 },
}

fn default_power() -> u32 {
    DEFAULT_KERNEL_POWER
}

impl Default for FunctionSpec {
    fn default() -> Self {
        FunctionSpec::DualConeKernel {
            power: DEFAULT_KERNEL_POWER,
            lambdas: None,
        }
    }
}

impl FunctionSpec {
    /// Instantiates the function on a domain.  Directionless scaled
    /// controls grow along the domain base point.
    pub fn build(&self, spec: &SiegelSpec) -> Result<TestFunction, ConfigError> {
        let f = match self {
            FunctionSpec::DualConeKernel { power, lambdas } => match lambdas {
                Some(rows) => TestFunction::dual_cone_kernel_with(spec, rows.clone(), *power)?,
                None => TestFunction::dual_cone_kernel(spec, *power)?,
            },
            FunctionSpec::ScaledControl {
                power,
                strength,
                direction,
                lambdas,
            } => {
                let dir = direction
                    .clone()
                    .unwrap_or_else(|| spec.base_point().to_vec());
                match lambdas {
                    Some(rows) => TestFunction::scaled_control_with(
                        spec,
                        rows.clone(),
                        *power,
                        *strength,
                        dir,
                    )?,
                    None => TestFunction::scaled_control(spec, *power, *strength, dir)?,
                }
            }
            FunctionSpec::Constant { re, im } => {
                TestFunction::constant(spec, Complex64::new(*re, *im))
            }
        };
        Ok(f)
    }
}

/// Height grid for monotonicity scans.  Missing `h0`/`hdir` resolve to a
/// quarter of the base point and the base point itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub h0: Option<Vec<f64>>,
    pub hdir: Option<Vec<f64>>,
    pub ts: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            h0: None,
            hdir: None,
            ts: vec![0.0, 0.25, 0.75, 1.75],
        }
    }
}

impl GridSpec {
    pub fn resolve(&self, spec: &SiegelSpec) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let h0 = self
            .h0
            .clone()
            .unwrap_or_else(|| spec.base_point().iter().map(|v| 0.25 * v).collect());
        let hdir = self
            .hdir
            .clone()
            .unwrap_or_else(|| spec.base_point().to_vec());
        (h0, hdir, self.ts.clone())
    }
}

/// Sampler parameters with config-level defaults.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSpec {
    pub samples: u64,
    pub blocks: u32,
    pub seed: u64,
}

impl Default for SamplerSpec {
    fn default() -> Self {
        let c = SamplerConfig::default();
        Self {
            samples: c.samples,
            blocks: c.blocks,
            seed: c.seed,
        }
    }
}

impl SamplerSpec {
    pub fn to_config(self) -> SamplerConfig {
        SamplerConfig {
            samples: self.samples,
            blocks: self.blocks,
            seed: self.seed,
        }
    }
}

/// Scale grids for the supremum comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorollarySpec {
    pub direction: Option<Vec<f64>>,
    pub to_zero: Vec<f64>,
    pub global: Vec<f64>,
}

impl Default for CorollarySpec {
    fn default() -> Self {
        Self {
            direction: None,
            to_zero: DEFAULT_TO_ZERO_SCALES.to_vec(),
            global: DEFAULT_GLOBAL_SCALES.to_vec(),
        }
    }
}

/// Disc sampling sizes for the disc-check subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscSpec {
    pub count: usize,
    pub degree: usize,
    pub scale: f64,
    pub n_theta: usize,
    pub submean: usize,
}

impl Default for DiscSpec {
    fn default() -> Self {
        Self {
            count: 100,
            degree: 3,
            scale: 0.75,
            n_theta: crate::disc::DEFAULT_NODES,
            submean: 25,
        }
    }
}

/// Audit size for the cone-report subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConeSpec {
    pub trials: usize,
}

impl Default for ConeSpec {
    fn default() -> Self {
        Self { trials: 200 }
    }
}

fn default_ps() -> Vec<Exponent> {
    vec![Exponent::Finite(2.0)]
}

/// A complete experiment description.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub domain: DomainSelector,
    #[serde(default)]
    pub function: FunctionSpec,
    #[serde(default = "default_ps")]
    pub p: Vec<Exponent>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub sampler: SamplerSpec,
    #[serde(default)]
    pub corollary: CorollarySpec,
    #[serde(default)]
    pub disc: DiscSpec,
    #[serde(default)]
    pub cone: ConeSpec,
    #[serde(default)]
    pub expect_violation: bool,
}

impl ExperimentConfig {
    /// Parses from text; `hint` is the lowercased file extension if known.
    pub fn from_str(text: &str, hint: Option<&str>) -> Result<Self, ConfigError> {
        match hint {
            Some("toml") => toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string())),
            Some("json") => {
                serde_json::from_str(text).map_err(|e| ConfigError::Json(e.to_string()))
            }
            _ => toml::from_str(text)
                .map_err(|e| ConfigError::Toml(e.to_string()))
                .or_else(|toml_err| {
                    serde_json::from_str(text).map_err(|json_err| {
                        ConfigError::Json(format!("{json_err} (TOML attempt: {toml_err})"))
                    })
                }),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let hint = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.to_ascii_lowercase());
        Self::from_str(&text, hint.as_deref())
    }

    /// Basic cross-field validation that does not need the domain built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.p.is_empty() {
            return Err(ConfigError::Invalid("p list must be non-empty".into()));
        }
        if self.grid.ts.is_empty() {
            return Err(ConfigError::Invalid("grid.ts must be non-empty".into()));
        }
        if self.sampler.blocks < 2 {
            return Err(ConfigError::Invalid("sampler.blocks must be >= 2".into()));
        }
        if self.sampler.samples < self.sampler.blocks as u64 {
            return Err(ConfigError::Invalid(
                "sampler.samples must cover every block".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml_config_uses_defaults() {
        let cfg = ExperimentConfig::from_str("domain = \"heisenberg(1)\"\n", Some("toml")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.p, vec![Exponent::Finite(2.0)]);
        assert_eq!(cfg.grid.ts, vec![0.0, 0.25, 0.75, 1.75]);
        assert_eq!(cfg.sampler.samples, 200_000);
        assert!(!cfg.expect_violation);
        let (label, spec) = cfg.domain.build().unwrap();
        assert_eq!(label, "heisenberg(1)");
        assert_eq!(spec.form().n(), 1);
    }

    #[test]
    fn full_toml_config_round_trips() {
        let text = r#"
domain = "ex2(1,2,1)"
p = [0.5, 1.0, "inf"]
expect_violation = true

[function]
kind = "scaled_control"
power = 2
strength = 0.5

[grid]
h0 = [0.25, 0.25, 0.0, 0.0]
hdir = [1.0, 1.0, 0.0, 0.0]
ts = [0.0, 0.5, 1.0]

[sampler]
samples = 50000
blocks = 10
seed = 99
"#;
        let cfg = ExperimentConfig::from_str(text, Some("toml")).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.p.len(), 3);
        assert_eq!(cfg.p[2], Exponent::Infinity);
        assert!(matches!(
            cfg.function,
            FunctionSpec::ScaledControl { power: 2, .. }
        ));
        assert_eq!(cfg.sampler.seed, 99);
        let (label, spec) = cfg.domain.build().unwrap();
        assert_eq!(label, "ex2(1,2,1)");
        let f = cfg.function.build(&spec).unwrap();
        assert!(f.label().starts_with("scaled_control"));
    }

    #[test]
    fn json_config_parses() {
        let text = r#"{
            "domain": "heisenberg(2)",
            "p": [2.0],
            "sampler": {"samples": 4000, "blocks": 4, "seed": 5}
        }"#;
        let cfg = ExperimentConfig::from_str(text, Some("json")).unwrap();
        assert_eq!(cfg.sampler.blocks, 4);
        let (_, spec) = cfg.domain.build().unwrap();
        assert_eq!(spec.form().n(), 2);
    }

    #[test]
    fn inline_domains_build() {
        let text = r#"{
            "domain": {
                "matrices": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]],
                "base_point": [1.0]
            }
        }"#;
        let cfg = ExperimentConfig::from_str(text, Some("json")).unwrap();
        let (label, spec) = cfg.domain.build().unwrap();
        assert_eq!(label, "inline");
        assert_eq!(spec.form().n(), 2);
        assert_eq!(spec.form().m(), 1);
        assert!(spec.omega_contains(&[0.5]));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ExperimentConfig::from_str(
            "domain = \"heisenberg(1)\"\nbogus = 3\n",
            Some("toml"),
        );
        assert!(err.is_err());
    }

    #[test]
    fn extensionless_text_tries_both_formats() {
        let toml_cfg = ExperimentConfig::from_str("domain = \"heisenberg(1)\"\n", None).unwrap();
        assert!(matches!(toml_cfg.domain, DomainSelector::Key(_)));
        let json_cfg =
            ExperimentConfig::from_str("{\"domain\": \"heisenberg(1)\"}", None).unwrap();
        assert!(matches!(json_cfg.domain, DomainSelector::Key(_)));
        assert!(ExperimentConfig::from_str("not a config", None).is_err());
    }

    #[test]
    fn grid_defaults_resolve_from_the_base_point() {
        let cfg = ExperimentConfig::from_str("domain = \"heisenberg(1)\"\n", Some("toml")).unwrap();
        let (_, spec) = cfg.domain.build().unwrap();
        let (h0, hdir, ts) = cfg.grid.resolve(&spec);
        assert_eq!(h0, vec![0.25]);
        assert_eq!(hdir, vec![1.0]);
        assert_eq!(ts.len(), 4);
    }
}
