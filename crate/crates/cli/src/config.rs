//! Run configuration: a flat TOML file with one level of sections, overridden
//! by command-line flags.

use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use largerho::Params;
use serde::{Deserialize, Serialize};

/// Marks errors that map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchChoice {
    Symmetric,
    Asymmetric,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyChoice {
    L1,
    L2,
    L3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SignChoice {
    Plus,
    Minus,
}

impl From<SignChoice> for largerho::Sign {
    fn from(s: SignChoice) -> Self {
        match s {
            SignChoice::Plus => largerho::Sign::Plus,
            SignChoice::Minus => largerho::Sign::Minus,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    #[serde(default)]
    pub branch: BranchFile,
    #[serde(default)]
    pub simulate: SimulateFile,
    #[serde(default)]
    pub hysteresis: HysteresisFile,
    #[serde(default)]
    pub orbit: OrbitFile,
    #[serde(default)]
    pub verify: VerifyFile,
    #[serde(default)]
    pub stenflo: StenfloFile,
    #[serde(default)]
    pub sample: SampleFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchFile {
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
    pub kind: Option<BranchChoice>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateFile {
    pub t_end: Option<f64>,
    pub t_transient: Option<f64>,
    pub runs: Option<usize>,
    pub sample_dt: Option<f64>,
    pub x0: Option<[f64; 3]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HysteresisFile {
    pub lambda0: Option<f64>,
    pub peak: Option<f64>,
    pub t_cross: Option<f64>,
    /// `[[t, lambda], ...]`; replaces the parabola when present.
    pub breakpoints: Option<Vec<[f64; 2]>>,
    pub window: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitFile {
    pub kind: Option<BranchChoice>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub grid: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StenfloFile {
    pub s: Option<f64>,
    pub t_end: Option<f64>,
    pub t_transient: Option<f64>,
    pub refine: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub family: Option<FamilyChoice>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub sign: Option<SignChoice>,
    pub points: Option<usize>,
}

pub fn load(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

/// Flag value, then file value, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Model parameters shared by every command, fully resolved.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Model {
    pub rho: f64,
    pub sigma: f64,
    pub beta: f64,
    pub lambda: f64,
    pub rtol: f64,
    pub atol: f64,
    pub seed: u64,
}

/// Common flags as given on the command line.
#[derive(Debug, Default, Clone)]
pub struct CommonFlags {
    pub rho: Option<f64>,
    pub sigma: Option<f64>,
    pub beta: Option<f64>,
    pub lambda: Option<f64>,
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub seed: Option<u64>,
}

impl Model {
    /// `lambda` fixes `sigma = lambda(beta + 2) - 1`; a flag beats the file and
    /// `lambda` beats `sigma` within the same layer.
    pub fn resolve(flags: &CommonFlags, file: &FileConfig) -> anyhow::Result<Self> {
        if flags.sigma.is_some() && flags.lambda.is_some() {
            return Err(config_error("give --sigma or --lambda, not both"));
        }
        let beta = pick(flags.beta, file.beta, 8.0 / 3.0);
        let sigma = match (flags.lambda, flags.sigma, file.lambda, file.sigma) {
            (Some(l), ..) => l * (beta + 2.0) - 1.0,
            (None, Some(s), ..) => s,
            (None, None, Some(l), _) => l * (beta + 2.0) - 1.0,
            (None, None, None, s) => s.unwrap_or(10.0),
        };
        let model = Self {
            rho: pick(flags.rho, file.rho, 1000.0),
            sigma,
            beta,
            lambda: (1.0 + sigma) / (beta + 2.0),
            rtol: pick(flags.rtol, file.rtol, 1e-9),
            atol: pick(flags.atol, file.atol, 1e-11),
            seed: pick(flags.seed, file.seed, 1),
        };
        if !(model.rtol > 0.0 && model.atol > 0.0) {
            return Err(config_error("tolerances must be positive"));
        }
        model.params()?;
        Ok(model)
    }

    pub fn params(&self) -> anyhow::Result<Params> {
        Params::new(self.sigma, self.beta)
            .and_then(|p| p.with_rho(self.rho))
            .map_err(|e| config_error(e.to_string()))
    }

    pub fn integrator(&self) -> largerho::odesim::IntegratorOptions {
        largerho::odesim::IntegratorOptions::tolerances(self.rtol, self.atol)
    }
}
