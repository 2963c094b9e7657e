//! Run configuration file (`--config`). Every table is optional; command-line
//! flags override what the file says. Relative paths are resolved against
//! the file's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use rowswitch::field::FieldConfig;
use rowswitch::fsm::{ControllerConfig, TrialSpec};
use rowswitch::profile::NoiseProfile;
use rowswitch::robot::RobotSpec;
use rowswitch::sensor::CameraModel;
use rowswitch::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Field fixture written by `generate-field`; generated from
    /// `field_config` and `field_seed` when absent.
    pub field: Option<PathBuf>,
    pub field_seed: u64,
    pub field_config: FieldConfig,
    /// Named noise profile.
    pub profile: String,
    /// Full noise profile, replacing the named one.
    pub noise: Option<NoiseProfile>,
    pub out: Option<PathBuf>,
    pub schedule: Schedule,
    /// Explicit trial list; overrides `schedule`.
    pub trials: Vec<TrialSpec>,
    pub allow_repeated_seeds: bool,
    pub controller: ControllerConfig,
    pub robot: RobotSpec,
    pub camera: CameraModel,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Schedule {
    pub count: usize,
    pub base_seed: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self { count: 18, base_seed: 1 }
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            field: None,
            field_seed: 1,
            field_config: FieldConfig::default(),
            profile: "paper-calibrated".into(),
            noise: None,
            out: None,
            schedule: Schedule::default(),
            trials: Vec::new(),
            allow_repeated_seeds: false,
            controller: ControllerConfig::default(),
            robot: RobotSpec::default(),
            camera: CameraModel::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e })?;
        let mut cfg: RunConfig = toml::from_str(&text).map_err(|e| Error::Parse { path: path.into(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut Option<PathBuf>| {
            if let Some(p) = p.as_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        };
        resolve(&mut cfg.field);
        resolve(&mut cfg.out);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(f) = &self.field {
            if !f.is_file() {
                return Err(Error::Config(format!("field file {} does not exist", f.display())));
            }
        }
        if !self.allow_repeated_seeds {
            let mut seen = HashSet::new();
            if let Some(t) = self.trials.iter().find(|t| !seen.insert(t.seed)) {
                return Err(Error::Config(format!(
                    "seed {} is used by more than one trial (set allow_repeated_seeds = true to repeat it)",
                    t.seed
                )));
            }
        }
        Ok(())
    }
}
