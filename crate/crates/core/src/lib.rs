//! Simulation engine for rastered (time-multiplexed) retinal-prosthesis
//! percepts.
//!
//! Safety limits prevent retinal implants from driving every electrode at
//! once, so devices cycle through timing groups in rapid succession. The
//! spatial arrangement and activation order of those groups — the raster
//! pattern — shapes what the user perceives. This crate renders the percepts
//! such a device would produce and quantifies how pattern choice (horizontal,
//! vertical, checkerboard, random) affects percept fidelity and
//! apparent-motion artifacts.
//!
//! The per-frame pipeline: a stimulus frame is preprocessed (grayscale,
//! area downscale, 3×3 Gaussian), shifted to follow gaze, sampled at the
//! electrode positions, masked to the active timing group, rendered through
//! the axon-map spatial model, and folded through coupled leaky integrators
//! for fading and persistence.
//!
//! Modules map onto the pipeline stages:
//!
//! - [`geometry`]: electrode arrays and µm/degree/pixel transforms
//! - [`raster`]: timing-group partitions, schedules, and pattern metrics
//! - [`stimuli`]: optotype and moving-bar stimulus generation
//! - [`pipeline`]: preprocessing, gaze handling, electrode sampling
//! - [`spatial`]: the axon-map model with a precomputed sparse weight map
//! - [`temporal`]: leaky-integrator fading/persistence dynamics
//! - [`harness`]: trial execution, virtual observers, evaluation sweeps
//! - [`config`]: TOML run configuration
//! - [`io`]: PGM frame sequences and manifests

pub mod config;
pub mod error;
pub mod frame;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod pipeline;
pub mod raster;
pub mod spatial;
pub mod stimuli;
pub mod temporal;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use frame::{Frame, FrameStream};
pub use geometry::{CoordinateSystem, ElectrodeArray, ElectrodeId};
pub use harness::{ConditionResult, ConfusionMatrix, Simulation, TrialConfig, TrialRecord};
pub use pipeline::{ActivationVector, GazeNoiseParams, GazeSample, GazeTrace};
pub use raster::{Coherence, RasterKind, RasterSchedule, ScheduleCursor};
pub use spatial::{AxonMap, AxonPath, AxonProvider, BuildOptions, PerceptGrid, SpatialParams};
pub use stimuli::{StimulusSpec, Task};
pub use temporal::{TemporalParams, TemporalState, UnitMode};
