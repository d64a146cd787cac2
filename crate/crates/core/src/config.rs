//! TOML configuration for the experiment harness.
//!
//! ```toml
//! [scenario]
//! preset = "case1"          # or: file = "my_scenario.json"
//!
//! [psofkp]
//! population = 20
//! iters = 200
//! c1 = 2.0
//! c2 = 2.0
//! w = 0.73
//! rho_pc = 0.5
//! kmeans_period = 20        # alias: kt
//!
//! [psod2p]
//! population = 20
//! iters = 200
//! c1 = 0.8
//! c2 = 0.8
//! w = 1.0
//! local_search_period = 20
//!
//! [energy]
//! charge_time_s = 30.0
//! hover_time_mode = "per_stop"   # or "per_node"
//!
//! [energy.propulsion]
//! # optional overrides: p0, pi, u_tip, v0, d0, s, rho_air, rotor_area,
//! # ps, v_move
//!
//! [experiment]
//! repetitions = 30
//! base_seed = 1
//! out_dir = "results"
//! ```
//!
//! Every key has a default; an empty file is a valid config.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::energy::{ChargingParams, HoverTimeMode, PropulsionParams};
use crate::error::{Error, Result};
use crate::psod2p::Psod2pParams;
use crate::psofkp::PsofkpParams;
use crate::scenario::{Preset, Scenario};

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct Config {
    pub scenario: ScenarioConfig,
    pub psofkp: PsofkpParams,
    pub psod2p: Psod2pParams,
    pub energy: EnergyConfig,
    pub experiment: ExperimentConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ScenarioConfig {
    /// One of the named cases (case1, case2, case3).
    pub preset: Option<String>,
    /// Path to a scenario JSON file; mutually exclusive with `preset`.
    pub file: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EnergyConfig {
    /// Charging dwell per hover stop (or per node, depending on the mode),
    /// seconds.
    pub charge_time_s: f64,
    pub hover_time_mode: HoverTimeMode,
    pub propulsion: PropulsionParams,
    pub charging: ChargingParams,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        EnergyConfig {
            charge_time_s: 30.0,
            hover_time_mode: HoverTimeMode::PerStop,
            propulsion: PropulsionParams::default(),
            charging: ChargingParams::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub repetitions: usize,
    pub base_seed: u64,
    pub out_dir: String,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { repetitions: 30, base_seed: 1, out_dir: "results".into() }
    }
}

impl Config {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let config: Config = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            detail: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenario.preset.is_some() && self.scenario.file.is_some() {
            return Err(Error::Config(
                "scenario.preset and scenario.file are mutually exclusive".into(),
            ));
        }
        if let Some(name) = &self.scenario.preset {
            Preset::parse(name)?;
        }
        self.psofkp.validate()?;
        self.psod2p.validate()?;
        self.energy.propulsion.validate()?;
        self.energy.charging.validate()?;
        if self.energy.charge_time_s < 0.0 {
            return Err(Error::Config("energy.charge_time_s must be non-negative".into()));
        }
        if self.experiment.repetitions == 0 {
            return Err(Error::Config("experiment.repetitions must be at least 1".into()));
        }
        Ok(())
    }

    /// Load the configured scenario: an explicit file wins, then a preset,
    /// then the default case1 instance.
    pub fn resolve_scenario(&self) -> Result<Scenario> {
        if let Some(file) = &self.scenario.file {
            return Scenario::load(file);
        }
        let name = self.scenario.preset.as_deref().unwrap_or("case1");
        Ok(Preset::parse(name)?.scenario())
    }

    /// Human-readable tag of the scenario source, for report headers.
    pub fn scenario_label(&self) -> String {
        if let Some(file) = &self.scenario.file {
            return file.clone();
        }
        self.scenario.preset.clone().unwrap_or_else(|| "case1".into())
    }
}
