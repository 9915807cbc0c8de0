//! Run configuration: defaults, TOML loading, and validation.
//!
//! Precedence is defaults < config file < command-line overrides; the
//! effective merged configuration is echoed alongside every output set.
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoordinateSystem, ElectrodeArray, DEFAULT_UM_PER_DEG};
use crate::raster::{RasterKind, RasterSchedule};
use crate::spatial::{AxonProvider, BuildOptions, PerceptGrid, SpatialParams};
use crate::stimuli::{StimulusSpec, Task};
use crate::temporal::{TemporalParams, UnitMode};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub rows: usize,
    pub cols: usize,
    pub spacing_um: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self { rows: 10, cols: 10, spacing_um: 400.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub fov_deg: f64,
    pub image_size: usize,
    pub um_per_deg: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { fov_deg: 60.0, image_size: 200, um_per_deg: DEFAULT_UM_PER_DEG }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RasterConfig {
    pub pattern: RasterKind,
    pub groups: usize,
    pub dwell_frames: usize,
    pub seed: u64,
}

impl Default for RasterConfig {
    fn default() -> Self {
        Self { pattern: RasterKind::None, groups: 5, dwell_frames: 4, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GazeConfig {
    pub trace_path: Option<String>,
    pub noise_sigma_deg: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpatialConfig {
    pub rho_um: f64,
    pub lambda_um: f64,
    pub axon_provider: AxonProvider,
    pub threshold: f64,
    pub path_step_um: f64,
    pub max_path_len_um: f64,
    pub cache_dir: Option<String>,
}

impl Default for SpatialConfig {
    fn default() -> Self {
        Self {
            rho_um: 300.0,
            lambda_um: 1000.0,
            axon_provider: AxonProvider::Spiral,
            threshold: 1e-3,
            path_step_um: 100.0,
            max_path_len_um: 6000.0,
            cache_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TemporalConfig {
    pub tau_n: f64,
    pub tau_b: f64,
    pub alpha: f64,
    pub enabled: bool,
    pub unit_mode: UnitMode,
}

impl Default for TemporalConfig {
    fn default() -> Self {
        Self { tau_n: 0.2, tau_b: 5.0, alpha: 0.2, enabled: true, unit_mode: UnitMode::Rate }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StimulusConfig {
    pub task: Task,
    pub letter: char,
    pub direction: usize,
    pub duration_s: f64,
    pub frame_rate_hz: f64,
    pub size_deg: f64,
}

impl Default for StimulusConfig {
    fn default() -> Self {
        Self {
            task: Task::Letter,
            letter: 'E',
            direction: 0,
            duration_s: 5.0,
            frame_rate_hz: 90.0,
            size_deg: 41.112,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarnessConfig {
    /// Repeats of each of the eight stimuli per condition (6 -> 48 trials).
    pub trials_per_stimulus: usize,
    pub conditions: Vec<RasterKind>,
    pub tasks: Vec<Task>,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            trials_per_stimulus: 6,
            conditions: RasterKind::ALL.to_vec(),
            tasks: vec![Task::Letter, Task::Motion],
        }
    }
}

/// Complete run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub array: ArrayConfig,
    pub sim: SimConfig,
    pub raster: RasterConfig,
    pub gaze: GazeConfig,
    pub spatial: SpatialConfig,
    pub temporal: TemporalConfig,
    pub stimulus: StimulusConfig,
    pub harness: HarnessConfig,
}

impl RunConfig {
    /// Parse a TOML config; fields not present keep their defaults, unknown
    /// keys are rejected.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
            what: "config".into(),
            detail: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            what: format!("config {}", path.display()),
            detail: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    /// Serialize the effective configuration.
    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.build_array()?;
        self.coordinate_system()?;
        self.spatial_params()?;
        self.temporal_params()?;
        if !(self.gaze.noise_sigma_deg >= 0.0) {
            return Err(Error::InvalidConfig("gaze.noise_sigma_deg must be >= 0".into()));
        }
        if self.harness.trials_per_stimulus == 0 {
            return Err(Error::InvalidConfig("harness.trials_per_stimulus must be >= 1".into()));
        }
        if self.harness.conditions.is_empty() {
            return Err(Error::InvalidConfig("harness.conditions must not be empty".into()));
        }
        if self.harness.tasks.is_empty() {
            return Err(Error::InvalidConfig("harness.tasks must not be empty".into()));
        }
        Ok(())
    }

    pub fn build_array(&self) -> Result<ElectrodeArray> {
        ElectrodeArray::build_grid(self.array.rows, self.array.cols, self.array.spacing_um)
    }

    pub fn coordinate_system(&self) -> Result<CoordinateSystem> {
        CoordinateSystem::new(self.sim.um_per_deg, self.sim.fov_deg, self.sim.image_size)
    }

    pub fn spatial_params(&self) -> Result<SpatialParams> {
        SpatialParams::new(self.spatial.rho_um, self.spatial.lambda_um)
    }

    pub fn build_options(&self) -> BuildOptions {
        BuildOptions {
            path_step_um: self.spatial.path_step_um,
            max_path_len_um: self.spatial.max_path_len_um,
            threshold: self.spatial.threshold,
        }
    }

    pub fn percept_grid(&self) -> Result<PerceptGrid> {
        PerceptGrid::for_array(
            &self.build_array()?,
            &self.spatial_params()?,
            self.sim.image_size,
            self.sim.um_per_deg,
        )
    }

    pub fn temporal_params(&self) -> Result<TemporalParams> {
        TemporalParams::new(
            self.temporal.tau_n,
            self.temporal.tau_b,
            self.temporal.alpha,
            self.temporal.unit_mode,
        )
    }

    /// Schedule for a raster pattern under this config's array and timing.
    pub fn build_schedule(&self, kind: RasterKind, seed: u64) -> Result<RasterSchedule> {
        let array = self.build_array()?;
        let groups = if kind == RasterKind::None { 1 } else { self.raster.groups };
        RasterSchedule::make_pattern(kind, &array, groups, self.raster.dwell_frames, seed)
    }

    pub fn stimulus_spec(&self) -> StimulusSpec {
        StimulusSpec {
            task: self.stimulus.task,
            letter: self.stimulus.letter,
            direction: self.stimulus.direction,
            duration_s: self.stimulus.duration_s,
            frame_rate_hz: self.stimulus.frame_rate_hz,
            size_deg: self.stimulus.size_deg,
        }
    }
}
