//! Mission configuration, loaded from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::trigger::TriggerConfig;
use crate::chain::TrackerConfig;
use crate::control::{DdpSchedule, DynamicsParams, MppiConfig, PdGains};
use crate::error::Error;
use crate::planner::{PlannerResponse, RemoteConfig};
use crate::verifier::VerifierConfig;
use crate::world::{generate_world_with, parse_world, GenerateParams, SensorConfig, Topology, WorldModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldSpec {
    pub topology: Topology,
    /// Side length, meters.
    pub size: f64,
    pub seed: u64,
    /// Load an archived world instead of generating one.
    pub file: Option<PathBuf>,
    pub generate: GenerateParams,
}

impl Default for WorldSpec {
    fn default() -> Self {
        Self { topology: Topology::L, size: 20.0, seed: 1, file: None, generate: GenerateParams::default() }
    }
}

impl WorldSpec {
    pub fn build(&self) -> Result<WorldModel, Error> {
        match &self.file {
            Some(path) => Ok(parse_world(&std::fs::read_to_string(path)?)?),
            None => {
                if !(20.0..=30.0).contains(&self.size) {
                    return Err(Error::Config(format!("world size {} outside 20..=30 m", self.size)));
                }
                Ok(generate_world_with(self.topology, self.size, self.seed, &self.generate))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    RuleBased,
    Scripted,
    Vlm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlannerConfig {
    pub kind: PlannerKind,
    /// Simulated answer latency of the rule-based and scripted planners, ticks.
    pub latency_ticks: u64,
    /// Responses for the scripted planner, in order.
    pub script: Vec<PlannerResponse>,
    /// Keep repeating the last scripted response.
    pub repeat_last: bool,
    pub remote: RemoteConfig,
    /// Copy full prompt text into query records.
    pub log_prompts: bool,
    /// Consecutive high-level failures that end the mission.
    pub max_failures: u32,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            kind: PlannerKind::RuleBased,
            latency_ticks: 100,
            script: Vec::new(),
            repeat_last: false,
            remote: RemoteConfig::default(),
            log_prompts: true,
            max_failures: 5,
        }
    }
}

/// Baseline and ablation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Everything on.
    Full,
    /// Planner answers are accepted without geometric checks.
    NoVerification,
    /// Free waypoint mode only.
    NoCentroidSelect,
    /// Nearest-unvisited heuristic regardless of `planner.kind`.
    RuleBased,
    /// Direct heading/speed tracking instead of MPPI.
    NoLowLevel,
    /// One query per one-second step; the robot holds position while waiting.
    Dream,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionMode {
    /// Planner called on the mission thread.
    Inline,
    /// Planner on its own thread behind a single-slot mailbox.
    Threaded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerConfig {
    pub mppi: MppiConfig<f64>,
    pub schedule: DdpSchedule<f64>,
    pub dynamics: DynamicsParams<f64>,
    pub pd: PdGains<f64>,
    /// Within this distance of the goal the robot brakes and holds, meters.
    pub arrive_radius: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            mppi: MppiConfig::default(),
            schedule: DdpSchedule::default(),
            dynamics: DynamicsParams::default(),
            pd: PdGains::default(),
            arrive_radius: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricsConfig {
    /// Share of a cluster's cells that must have been in view.
    pub cover_fraction: f64,
    /// Coverage level timed by `Cov-Time`, percent.
    pub cov_time_percent: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { cover_fraction: 0.6, cov_time_percent: 50.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MissionConfig {
    pub name: String,
    /// Control period, seconds.
    pub dt: f64,
    pub tick_budget: u64,
    pub seed: u64,
    pub variant: Variant,
    pub execution: ExecutionMode,
    /// Distance of the first goal straight ahead of the start pose, meters.
    pub initial_waypoint: f64,
    pub robot_radius: f64,
    pub world: WorldSpec,
    pub sensor: SensorConfig,
    pub planner: PlannerConfig,
    pub tracker: TrackerConfig<f64>,
    /// Minimum connected target area kept as a cluster, cells.
    pub min_region_cells: usize,
    pub verifier: VerifierConfig<f64>,
    pub controller: ControllerConfig,
    pub trigger: TriggerConfig,
    pub metrics: MetricsConfig,
}

impl Default for MissionConfig {
    fn default() -> Self {
        Self {
            name: "mission".into(),
            dt: 0.1,
            tick_budget: 20_000,
            seed: 0,
            variant: Variant::Full,
            execution: ExecutionMode::Inline,
            initial_waypoint: 3.0,
            robot_radius: crate::world::ROBOT_RADIUS,
            world: WorldSpec::default(),
            sensor: SensorConfig::default(),
            planner: PlannerConfig::default(),
            tracker: TrackerConfig::default(),
            min_region_cells: crate::chain::DEFAULT_MIN_AREA,
            verifier: VerifierConfig::default(),
            controller: ControllerConfig::default(),
            trigger: TriggerConfig::default(),
            metrics: MetricsConfig::default(),
        }
    }
}

impl MissionConfig {
    pub fn from_toml(text: &str) -> Result<Self, Error> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        if let (Some(file), Some(dir)) = (&cfg.world.file, path.parent()) {
            if file.is_relative() {
                cfg.world.file = Some(dir.join(file));
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("mission config serializes")
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config("dt must be positive".into()));
        }
        if !(self.sensor.fov > 0.0 && self.sensor.fov <= std::f64::consts::PI) || self.sensor.rays < 3 || !(self.sensor.d_max > 0.0) {
            return Err(Error::Config("sensor needs fov in (0, π], at least 3 rays and positive range".into()));
        }
        if !(self.robot_radius > 0.0) {
            return Err(Error::Config("robot radius must be positive".into()));
        }
        self.tracker.validate()?;
        self.verifier.validate()?;
        self.controller.schedule.validate()?;
        self.trigger.validate()?;
        if self.planner.kind == PlannerKind::Scripted && self.planner.script.is_empty() && self.variant != Variant::RuleBased {
            return Err(Error::Config("scripted planner needs a non-empty script".into()));
        }
        if !(0.0..=1.0).contains(&self.metrics.cover_fraction) {
            return Err(Error::Config("cover_fraction must lie in [0, 1]".into()));
        }
        Ok(())
    }
}
