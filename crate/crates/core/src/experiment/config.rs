use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Output directory used when neither the config nor the caller names one.
pub const DEFAULT_OUTPUT_DIR: &str = "qpair-output";

/// Profile name that selects a noiseless model.
pub const NOISELESS_PROFILE: &str = "none";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Toggle {
    On,
    Off,
}

impl Toggle {
    pub fn is_on(self) -> bool {
        self == Toggle::On
    }
}

impl From<bool> for Toggle {
    fn from(on: bool) -> Self {
        if on {
            Toggle::On
        } else {
            Toggle::Off
        }
    }
}

impl<'de> Deserialize<'de> for Toggle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Flag(bool),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Flag(b) => Ok(b.into()),
            Raw::Word(w) => match w.as_str() {
                "on" => Ok(Toggle::On),
                "off" => Ok(Toggle::Off),
                other => Err(serde::de::Error::custom(format!("expected `on` or `off`, got `{other}`"))),
            },
        }
    }
}

/// Everything a run depends on. Missing JSON fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    #[serde(alias = "topology")]
    pub topology_name: String,
    /// Shipped profile name, profile path, or `none`. Empty picks the
    /// profile shipped for the topology.
    pub profile: String,
    pub shots: u64,
    pub repeats: usize,
    pub trajectories: usize,
    pub seed: u64,
    pub tomography: Toggle,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            topology_name: "ibmq_16_melbourne".into(),
            profile: String::new(),
            shots: 8192,
            repeats: 20,
            trajectories: 4096,
            seed: 42,
            tomography: Toggle::On,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn for_topology(name: &str) -> Self {
        Self { topology_name: name.into(), ..Self::default() }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    pub fn validate(&self) -> Result<()> {
        for (what, v) in [("shots", self.shots as usize), ("repeats", self.repeats), ("trajectories", self.trajectories)] {
            if v == 0 {
                return Err(Error::InvalidConfig(format!("{what} must be positive")));
            }
        }
        if self.topology_name.trim().is_empty() {
            return Err(Error::InvalidConfig("topology_name must not be empty".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| Error::Parse { path: origin.into(), message: e.to_string() })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
