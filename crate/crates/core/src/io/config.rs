use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bekk::{bovespa_bekk, BekkParams, BfgsConfig};
use crate::error::{Error, Result};
use crate::inference::{PriorSpec, StructureCandidate, ThresholdGrid};
use crate::tar::presets::{preset, preset_json, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    Simulate,
    Moments,
    FitTar,
    FitBekk,
    Nic,
    Validate,
    Compare,
}

impl Pipeline {
    pub const ALL: [Pipeline; 7] = [
        Pipeline::Simulate,
        Pipeline::Moments,
        Pipeline::FitTar,
        Pipeline::FitBekk,
        Pipeline::Nic,
        Pipeline::Validate,
        Pipeline::Compare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Pipeline::Simulate => "simulate",
            Pipeline::Moments => "moments",
            Pipeline::FitTar => "fit-tar",
            Pipeline::FitBekk => "fit-bekk",
            Pipeline::Nic => "nic",
            Pipeline::Validate => "validate",
            Pipeline::Compare => "compare",
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Pipeline {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Pipeline::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = Pipeline::ALL.iter().map(|p| p.name()).collect();
            Error::Config(format!("unknown pipeline `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

/// Price files for the target series X and the threshold series Z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub target: PathBuf,
    pub threshold: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateOptions {
    pub reps: usize,
    pub len: usize,
    pub burn_in: usize,
}

impl Default for SimulateOptions {
    fn default() -> Self {
        SimulateOptions { reps: 1000, len: 300, burn_in: 300 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsOptions {
    /// Autocovariance lags reported when the model has a threshold process.
    pub max_lag: usize,
}

impl Default for MomentsOptions {
    fn default() -> Self {
        MomentsOptions { max_lag: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitTarOptions {
    pub max_l: usize,
    pub max_k: usize,
    pub grid: ThresholdGrid,
    /// Delays tried by the nonlinearity test.
    pub delays: Vec<usize>,
    /// Skip identification and use this structure.
    pub structure: Option<StructureCandidate>,
    pub prior: Option<PriorSpec>,
    pub iters: usize,
    pub burn_in: usize,
}

impl Default for FitTarOptions {
    fn default() -> Self {
        FitTarOptions {
            max_l: 2,
            max_k: 6,
            grid: ThresholdGrid::default(),
            delays: vec![0],
            structure: None,
            prior: None,
            iters: 6000,
            burn_in: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitBekkOptions {
    pub p: usize,
    pub optimizer: BfgsConfig,
    pub init: Option<BekkParams>,
    /// Points per axis of the news impact surface.
    pub nis_points: usize,
    /// Lags of the residual diagnostics.
    pub diagnostic_lags: usize,
    pub asymmetry_lags: usize,
}

impl Default for FitBekkOptions {
    fn default() -> Self {
        FitBekkOptions {
            p: 1,
            optimizer: BfgsConfig::default(),
            init: None,
            nis_points: 41,
            diagnostic_lags: 15,
            asymmetry_lags: crate::bekk::DEFAULT_ENDERS_LAGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NicOptions {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Default for NicOptions {
    fn default() -> Self {
        NicOptions { from: -0.1, to: 0.1, points: 401 }
    }
}

impl NicOptions {
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.to - self.from) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.from + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateOptions {
    pub max_lag: usize,
    pub level: f64,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        ValidateOptions { max_lag: 20, level: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CompareOptions {
    /// Length of the simulated BEKK path used when no data are given.
    pub sim_len: usize,
    pub burn_in: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { sim_len: 100_000, burn_in: 1000 }
    }
}

/// One experiment. Every field can also be set from the command line.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub pipeline: Option<Pipeline>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// TAR model: a preset name or a path to a model JSON file.
    pub model: Option<String>,
    /// BEKK parameters: `bovespa-bekk` or a path to a parameter JSON file.
    pub bekk_model: Option<String>,
    pub inputs: Option<Inputs>,
    pub simulate: SimulateOptions,
    pub moments: MomentsOptions,
    pub fit_tar: FitTarOptions,
    pub fit_bekk: FitBekkOptions,
    pub nic: NicOptions,
    pub validate: ValidateOptions,
    pub compare: CompareOptions,
}

fn cfg_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| cfg_err(format!("invalid configuration: {e}")))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| cfg_err(format!("cannot read configuration {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn pipeline(&self) -> Result<Pipeline> {
        self.pipeline.ok_or_else(|| cfg_err("no pipeline selected"))
    }

    pub fn model_source(&self, default: Option<&str>) -> Result<String> {
        self.model
            .clone()
            .or_else(|| default.map(String::from))
            .ok_or_else(|| cfg_err("a TAR model (preset name or JSON path) is required"))
    }

    /// Checks everything that can be checked without running the pipeline.
    pub fn validate(&self) -> Result<Pipeline> {
        let pipeline = self.pipeline()?;
        let needs_inputs = matches!(pipeline, Pipeline::FitTar | Pipeline::FitBekk | Pipeline::Validate);
        if needs_inputs && self.inputs.is_none() {
            return Err(cfg_err(format!("pipeline {pipeline} needs `inputs` (target and threshold price files)")));
        }
        if let Some(inp) = &self.inputs {
            for p in [&inp.target, &inp.threshold] {
                if !p.exists() {
                    return Err(cfg_err(format!("input file {} does not exist", p.display())));
                }
            }
        }
        if let Some(m) = &self.model {
            if preset_json(m).is_none() && !Path::new(m).exists() {
                return Err(cfg_err(format!("model `{m}` is neither a preset nor an existing file")));
            }
        }
        if let Some(m) = &self.bekk_model {
            if m != "bovespa-bekk" && !Path::new(m).exists() {
                return Err(cfg_err(format!("BEKK model `{m}` is neither a preset nor an existing file")));
            }
        }
        let s = &self.simulate;
        if s.reps < 2 || s.len < 10 {
            return Err(cfg_err("simulate needs reps >= 2 and len >= 10"));
        }
        let f = &self.fit_tar;
        if f.iters <= f.burn_in {
            return Err(cfg_err("fit_tar.iters must exceed fit_tar.burn_in"));
        }
        if f.max_l < 1 || f.delays.is_empty() {
            return Err(cfg_err("fit_tar needs max_l >= 1 and at least one delay"));
        }
        let n = &self.nic;
        if n.points < 2 || !(n.from < n.to) {
            return Err(cfg_err("nic grid needs from < to and at least two points"));
        }
        if self.fit_bekk.nis_points < 2 {
            return Err(cfg_err("fit_bekk.nis_points must be at least 2"));
        }
        let v = &self.validate;
        if ![0.01, 0.05, 0.10].iter().any(|l| (l - v.level).abs() < 1e-12) {
            return Err(cfg_err("validate.level must be 0.01, 0.05 or 0.10"));
        }
        Ok(pipeline)
    }
}

/// Resolves a preset name or a model JSON path.
pub fn load_model(source: &str) -> Result<Model> {
    if preset_json(source).is_some() {
        return preset(source);
    }
    let text = std::fs::read_to_string(source).map_err(|e| cfg_err(format!("cannot read model {source}: {e}")))?;
    let name = Path::new(source).file_stem().and_then(|s| s.to_str()).unwrap_or(source);
    Model::from_json(name, &text)
}

pub fn load_bekk(source: &str) -> Result<BekkParams> {
    if source == "bovespa-bekk" {
        return Ok(bovespa_bekk());
    }
    let text = std::fs::read_to_string(source).map_err(|e| cfg_err(format!("cannot read BEKK model {source}: {e}")))?;
    let p: BekkParams = serde_json::from_str(&text).map_err(|e| cfg_err(format!("invalid BEKK model {source}: {e}")))?;
    p.validate()?;
    Ok(p)
}
