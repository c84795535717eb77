//! Flat key-value configuration files (TOML syntax, no tables).
//!
//! Every key is optional; missing keys take the published defaults. Unknown
//! keys are rejected so that a typo cannot silently fall back to a default.

use std::fs;
use std::path::{Path, PathBuf};

use sapin_core::experiment::{Condition, ExperimentConfig};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unknown condition `{0}` (expected failure-only, failure-plus-probabilistic or no-punishment)")]
    Condition(String),
    #[error(transparent)]
    Invalid(#[from] sapin_core::Error),
}

/// On-disk form. Field names are the accepted keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub agents: Option<usize>,
    pub max_episodes: Option<usize>,
    pub condition: Option<String>,
    pub lock_on_success: Option<bool>,
    pub continue_after_lock: Option<bool>,
    pub eval_episodes: Option<usize>,
    pub processing_cells: Option<usize>,
    pub eta: Option<f64>,
    pub macro_episode: Option<usize>,
    pub min_desire: Option<f64>,
    pub eps_rand: Option<f64>,
    pub random_inclusion: Option<f64>,
    pub catastrophic_epicenters: Option<usize>,
    pub punish_angle_min_deg: Option<f64>,
    pub punish_angle_max_deg: Option<f64>,
    pub punish_probability_min: Option<f64>,
    pub punish_probability_max: Option<f64>,
    pub punish_fraction_min: Option<f64>,
    pub punish_fraction_max: Option<f64>,
}

/// Command-line overrides; these win over file values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub agents: Option<usize>,
    pub episodes: Option<usize>,
    pub condition: Option<String>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    /// Fills an [`ExperimentConfig`] from defaults, this file, then `overrides`.
    pub fn resolve(&self, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
        let mut c = ExperimentConfig::default();
        macro_rules! set {
            ($($src:ident => $($dst:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$src.clone() { c.$($dst).+ = v; })*
            };
        }
        set! {
            seed => seed,
            agents => agents,
            max_episodes => max_episodes,
            lock_on_success => lock_on_success,
            continue_after_lock => continue_after_lock,
            eval_episodes => eval_episodes,
            processing_cells => sim.processing_cells,
            eta => sim.eta,
            macro_episode => sim.macro_episode,
            min_desire => sim.movement.min_desire,
            eps_rand => sim.movement.eps_rand,
            random_inclusion => sim.movement.random_inclusion,
            catastrophic_epicenters => sim.punishment.catastrophic_epicenters,
            punish_angle_min_deg => sim.punishment.angle_min_deg,
            punish_angle_max_deg => sim.punishment.angle_max_deg,
            punish_probability_min => sim.punishment.probability_min,
            punish_probability_max => sim.punishment.probability_max,
            punish_fraction_min => sim.punishment.fraction_min,
            punish_fraction_max => sim.punishment.fraction_max,
        }
        if let Some(name) = overrides.condition.as_ref().or(self.condition.as_ref()) {
            c.condition =
                Condition::parse(name).ok_or_else(|| ConfigError::Condition(name.clone()))?;
        }
        if let Some(seed) = overrides.seed {
            c.seed = seed;
        }
        if let Some(agents) = overrides.agents {
            c.agents = agents;
        }
        if let Some(episodes) = overrides.episodes {
            c.max_episodes = episodes;
        }
        c.validate()?;
        Ok(c)
    }

    /// The file form of an effective configuration, with every key present.
    pub fn echo(c: &ExperimentConfig) -> Self {
        let m = &c.sim.movement;
        let p = &c.sim.punishment;
        Self {
            seed: Some(c.seed),
            agents: Some(c.agents),
            max_episodes: Some(c.max_episodes),
            condition: Some(c.condition.name().to_string()),
            lock_on_success: Some(c.lock_on_success),
            continue_after_lock: Some(c.continue_after_lock),
            eval_episodes: Some(c.eval_episodes),
            processing_cells: Some(c.sim.processing_cells),
            eta: Some(c.sim.eta),
            macro_episode: Some(c.sim.macro_episode),
            min_desire: Some(m.min_desire),
            eps_rand: Some(m.eps_rand),
            random_inclusion: Some(m.random_inclusion),
            catastrophic_epicenters: Some(p.catastrophic_epicenters),
            punish_angle_min_deg: Some(p.angle_min_deg),
            punish_angle_max_deg: Some(p.angle_max_deg),
            punish_probability_min: Some(p.probability_min),
            punish_probability_max: Some(p.probability_max),
            punish_fraction_min: Some(p.fraction_min),
            punish_fraction_max: Some(p.fraction_max),
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }
}

/// Reads `path` and applies `overrides` on top of it.
pub fn load_config(path: &Path, overrides: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    FileConfig::parse(&text, path)?.resolve(overrides)
}
