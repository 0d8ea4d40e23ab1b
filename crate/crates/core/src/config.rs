//! The run-configuration file: one versioned, human-editable TOML tree
//! holding every numeric default of the pipeline. Generation commands embed a
//! digest of the effective configuration in their outputs.

use crate::grasp::{DomainRandomizationSpec, GripperSpec};
use crate::qd::RunConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unsupported config version {found} (supported: {CONFIG_VERSION})")]
    Version { found: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Optimizer parameters as they appear in the `[qd]` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QdParams {
    pub eval_budget: usize,
    pub batch_size: usize,
    pub init_fraction: f64,
    pub mutation_sigma_pos: f64,
    pub mutation_sigma_rot: f64,
    pub standoff: [f64; 2],
    pub tilt_cone: f64,
    pub bins_per_axis: u32,
}

impl Default for QdParams {
    fn default() -> Self {
        let r = RunConfig::default();
        QdParams {
            eval_budget: r.eval_budget,
            batch_size: r.batch_size,
            init_fraction: r.init_fraction,
            mutation_sigma_pos: r.mutation_sigma_pos,
            mutation_sigma_rot: r.mutation_sigma_rot,
            standoff: r.standoff,
            tilt_cone: r.tilt_cone,
            bins_per_axis: r.bins_per_axis,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub version: Option<u32>,
    pub gripper: GripperSpec,
    pub domain_randomization: DomainRandomizationSpec,
    pub qd: QdParams,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: FileConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if let Some(found) = config.version {
            if found != CONFIG_VERSION {
                return Err(ConfigError::Version { found });
            }
        }
        Ok(config)
    }

    /// Assemble the effective run configuration for a given seed.
    pub fn to_run_config(&self, rng_seed: u64, stop_after_bootstrap: bool) -> RunConfig {
        RunConfig {
            eval_budget: self.qd.eval_budget,
            batch_size: self.qd.batch_size,
            init_fraction: self.qd.init_fraction,
            mutation_sigma_pos: self.qd.mutation_sigma_pos,
            mutation_sigma_rot: self.qd.mutation_sigma_rot,
            standoff: self.qd.standoff,
            tilt_cone: self.qd.tilt_cone,
            bins_per_axis: self.qd.bins_per_axis,
            rng_seed,
            stop_after_bootstrap,
            gripper: self.gripper.clone(),
            dr: self.domain_randomization.clone(),
        }
    }

    /// The default configuration rendered as a documented TOML file.
    pub fn example_toml() -> String {
        let config = FileConfig {
            version: Some(CONFIG_VERSION),
            ..Default::default()
        };
        toml::to_string_pretty(&config).expect("default config serializes")
    }
}

/// Provenance digest of an effective run configuration (seed excluded, so a
/// dataset regenerated under another seed still names the same settings).
pub fn run_config_digest(config: &RunConfig) -> String {
    let mut scrubbed = config.clone();
    scrubbed.rng_seed = 0;
    scrubbed.stop_after_bootstrap = false;
    let bytes = serde_json::to_vec(&scrubbed).expect("config serializes");
    let mut h = Sha256::new();
    h.update(&bytes);
    hex::encode(<[u8; 32]>::from(h.finalize()))
}
