//! Built-in models shipped as JSON fixtures.

use super::probs::{regime_probabilities, RegimeProbs};
use super::spec::{ModelDocument, TarSpec, ZProcessSpec};
use crate::error::{Error, Result};

const M1: &str = include_str!("../../presets/m1.json");
const M2: &str = include_str!("../../presets/m2.json");
const M3: &str = include_str!("../../presets/m3.json");
const BOVESPA: &str = include_str!("../../presets/bovespa-tar.json");

pub const PRESET_NAMES: [&str; 4] = ["m1", "m2", "m3", "bovespa-tar"];

/// A parsed model with its threshold process and regime probabilities.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    pub spec: TarSpec,
    pub z: Option<ZProcessSpec>,
    pub probs: RegimeProbs,
    pub document: ModelDocument,
}

impl Model {
    /// Builds a model from a document. Explicit `probabilities` take
    /// precedence; otherwise they are derived from `z`.
    pub fn from_document(name: &str, document: ModelDocument) -> Result<Self> {
        let spec = document.to_spec()?;
        let probs = match (&document.probabilities, &document.z) {
            (Some(p), _) => {
                if p.len() != spec.l() {
                    return Err(Error::InvalidSpec(format!("{} probabilities for {} regimes", p.len(), spec.l())));
                }
                RegimeProbs::from_marginals(p.clone())?
            }
            (None, Some(z)) => regime_probabilities(z, spec.thresholds(), &[])?,
            (None, None) => {
                return Err(Error::InvalidSpec("model needs either `z` or `probabilities`".into()));
            }
        };
        Ok(Model { name: name.to_string(), z: document.z.clone(), spec, probs, document })
    }

    pub fn from_json(name: &str, text: &str) -> Result<Self> {
        Self::from_document(name, ModelDocument::from_json(text)?)
    }

    /// Threshold process, or an error when the model does not carry one.
    pub fn z_process(&self) -> Result<&ZProcessSpec> {
        self.z
            .as_ref()
            .ok_or_else(|| Error::InvalidSpec(format!("model {} has no threshold process", self.name)))
    }
}

pub fn preset_json(name: &str) -> Option<&'static str> {
    match name {
        "m1" => Some(M1),
        "m2" => Some(M2),
        "m3" => Some(M3),
        "bovespa-tar" | "bovespa" => Some(BOVESPA),
        _ => None,
    }
}

pub fn preset(name: &str) -> Result<Model> {
    let text = preset_json(name).ok_or_else(|| {
        Error::Config(format!("unknown preset `{name}` (available: {})", PRESET_NAMES.join(", ")))
    })?;
    Model::from_json(name, text)
}

pub fn m1() -> Model {
    preset("m1").expect("bundled preset")
}

pub fn m2() -> Model {
    preset("m2").expect("bundled preset")
}

pub fn m3() -> Model {
    preset("m3").expect("bundled preset")
}

pub fn bovespa() -> Model {
    preset("bovespa-tar").expect("bundled preset")
}
