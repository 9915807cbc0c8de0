//! End-to-end trial execution and computational evaluation: runs
//! stimulus × raster × gaze through the full pipeline, applies the virtual
//! observers, and aggregates fidelity, bias, and accuracy metrics.

pub mod gaze_eval;
pub mod observer;
pub mod stats;

use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameStream};
use crate::geometry::{CoordinateSystem, ElectrodeArray};
use crate::pipeline::{
    gaze_shift, inject_gaze_noise, mask_by_raster, preprocess, sample_activations,
    GazeNoiseParams, GazeTrace,
};
use crate::raster::{compass_name, Coherence, RasterKind, RasterSchedule};
use crate::spatial::{AxonMap, MaskBounds, PerceptGrid};
use crate::stimuli::{self, StimulusSpec, Task, DIRECTIONS, LETTERS};
use crate::temporal::{TemporalParams, TemporalState};

pub use gaze_eval::{dot_course, gaze_error_stats, sample_target, GazeErrorStats};
pub use observer::{fidelity, letter_observer, motion_observer, stream_coherence, Prediction};

/// Cadence at which gaze noise samples are drawn, matching the eye tracker's
/// measurement interval (s).
pub const GAZE_SAMPLE_DT: f64 = 0.1;

/// Everything that varies between trials; together with the engine's
/// [`RunConfig`] this replays a trial exactly.
#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub stimulus: StimulusSpec,
    pub raster: RasterKind,
    /// Seed of the random raster kind's per-cycle partitions.
    pub raster_seed: u64,
    /// Base gaze trace (central fixation unless a recorded trace is used).
    pub gaze: GazeTrace,
    /// Gaze noise scale; sampled at [`GAZE_SAMPLE_DT`] with the trial seed.
    pub noise_sigma_deg: f64,
    pub temporal_enabled: bool,
    pub trial_seed: u64,
}

impl TrialConfig {
    /// Trial of `stimulus` under `raster` with the engine defaults: static
    /// central fixation, no gaze noise, temporal dynamics per config.
    pub fn new(stimulus: StimulusSpec, raster: RasterKind, trial_seed: u64) -> Self {
        Self {
            stimulus,
            raster,
            raster_seed: trial_seed,
            gaze: GazeTrace::static_center(),
            noise_sigma_deg: 0.0,
            temporal_enabled: true,
            trial_seed,
        }
    }
}

/// Outcome of one trial.
#[derive(Clone, Debug)]
pub struct TrialRecord {
    pub condition: RasterKind,
    pub task: Task,
    pub true_label: usize,
    pub predicted: Option<Prediction>,
    pub per_frame_fidelity: Vec<f64>,
    pub mean_fidelity: Option<f64>,
    /// Directional coherence of the percept stream.
    pub coherence: Coherence,
    /// Wall-clock cost of each pipeline frame.
    pub frame_ms: Vec<f64>,
    pub mean_frame_ms: f64,
    pub trial_seed: u64,
}

impl TrialRecord {
    pub fn correct(&self) -> bool {
        self.predicted.and_then(|p| p.label()) == Some(self.true_label)
    }
}

/// 8×8 confusion counts (rows = true, cols = predicted) plus explicit
/// no-percept outcomes per true label.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfusionMatrix {
    pub counts: [[u32; 8]; 8],
    pub no_percept: [u32; 8],
}

impl ConfusionMatrix {
    pub fn record(&mut self, true_label: usize, prediction: Prediction) {
        match prediction {
            Prediction::Label(p) => self.counts[true_label][p] += 1,
            Prediction::NoPercept => self.no_percept[true_label] += 1,
        }
    }

    pub fn row_total(&self, true_label: usize) -> u32 {
        self.counts[true_label].iter().sum::<u32>() + self.no_percept[true_label]
    }

    pub fn total(&self) -> u32 {
        (0..8).map(|r| self.row_total(r)).sum()
    }

    pub fn correct(&self) -> u32 {
        (0..8).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        self.correct() as f64 / total as f64
    }

    /// CSV with a header of predicted labels and one row per true label.
    pub fn to_csv(&self, labels: &[String]) -> String {
        let mut out = String::from("true\\pred");
        for l in labels {
            out.push(',');
            out.push_str(l);
        }
        out.push_str(",no_percept\n");
        for (r, label) in labels.iter().enumerate() {
            out.push_str(label);
            for c in 0..8 {
                out.push_str(&format!(",{}", self.counts[r][c]));
            }
            out.push_str(&format!(",{}\n", self.no_percept[r]));
        }
        out
    }
}

/// Aggregated outcome of one condition × task block.
#[derive(Clone, Debug)]
pub struct ConditionResult {
    pub condition: RasterKind,
    pub task: Task,
    pub accuracy: f64,
    pub mean_fidelity: f64,
    pub confusion: ConfusionMatrix,
    pub records: Vec<TrialRecord>,
}

/// Human-readable label of a response alternative.
pub fn label_name(task: Task, index: usize) -> String {
    match task {
        Task::Letter => LETTERS[index].to_string(),
        Task::Motion => compass_name(index).to_string(),
    }
}

/// All eight response-alternative labels of a task.
pub fn label_names(task: Task) -> Vec<String> {
    (0..8).map(|i| label_name(task, i)).collect()
}

/// splitmix64; used to derive independent per-trial seeds.
pub fn mix_seed(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-trial seed derived from the master seed and the trial's coordinates.
pub fn trial_seed(master: u64, task: Task, condition: RasterKind, stim: usize, rep: usize) -> u64 {
    let t = match task {
        Task::Letter => 1u64,
        Task::Motion => 2u64,
    };
    let c = RasterKind::ALL.iter().position(|&k| k == condition).unwrap_or(0) as u64;
    mix_seed(master ^ mix_seed(t ^ mix_seed(c ^ mix_seed((stim as u64) << 8 | rep as u64))))
}

/// A ready-to-run simulation: electrode array, coordinate systems, and the
/// precomputed axon map. Immutable; trials can run concurrently.
pub struct Simulation {
    cfg: RunConfig,
    array: ElectrodeArray,
    cs: CoordinateSystem,
    grid: PerceptGrid,
    map: AxonMap,
    temporal: TemporalParams,
    bounds_cache: Mutex<HashMap<RasterKind, Arc<Vec<MaskBounds>>>>,
    template_cache: Mutex<Option<Arc<Vec<Frame>>>>,
}

impl Simulation {
    /// Validate the config and precompute the axon map (loading it from the
    /// configured cache directory when possible).
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let array = cfg.build_array()?;
        let cs = cfg.coordinate_system()?;
        let grid = cfg.percept_grid()?;
        let params = cfg.spatial_params()?;
        let options = cfg.build_options();
        let provider = cfg.spatial.axon_provider;
        let key = AxonMap::cache_key(&array, &grid, &params, provider, &options);
        let cache_dir = cfg.spatial.cache_dir.clone();
        let map = match &cache_dir {
            Some(dir) => match AxonMap::load_cache(Path::new(dir), &key)? {
                Some(map) => map,
                None => {
                    let map = AxonMap::build(&array, &grid, &params, provider, &options)?;
                    map.save_cache(Path::new(dir), &key)?;
                    map
                }
            },
            None => AxonMap::build(&array, &grid, &params, provider, &options)?,
        };
        let temporal = cfg.temporal_params()?;
        Ok(Self {
            cfg,
            array,
            cs,
            grid,
            map,
            temporal,
            bounds_cache: Mutex::new(HashMap::new()),
            template_cache: Mutex::new(None),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn array(&self) -> &ElectrodeArray {
        &self.array
    }

    pub fn coordinate_system(&self) -> &CoordinateSystem {
        &self.cs
    }

    pub fn percept_grid(&self) -> &PerceptGrid {
        &self.grid
    }

    pub fn axon_map(&self) -> &AxonMap {
        &self.map
    }

    /// Group-indexed pruning bounds for a schedule's base partition; `None`
    /// for the random kind, whose partition changes every cycle.
    fn bounds_for(&self, schedule: &RasterSchedule) -> Option<Arc<Vec<MaskBounds>>> {
        if schedule.kind() == RasterKind::Random {
            return None;
        }
        let mut cache = self.bounds_cache.lock().unwrap();
        let entry = cache.entry(schedule.kind()).or_insert_with(|| {
            Arc::new(
                schedule
                    .groups()
                    .iter()
                    .map(|g| self.map.mask_bounds(g))
                    .collect::<Vec<_>>(),
            )
        });
        Some(Arc::clone(entry))
    }

    /// The gaze trace actually applied to a trial: base trace, resampled and
    /// perturbed when noise is enabled.
    fn effective_trace(&self, tc: &TrialConfig) -> GazeTrace {
        if tc.noise_sigma_deg <= 0.0 {
            return tc.gaze.clone();
        }
        let n = (tc.stimulus.duration_s / GAZE_SAMPLE_DT).ceil() as usize;
        let samples = (0..=n)
            .map(|k| {
                let t = k as f64 * GAZE_SAMPLE_DT;
                let mut s = tc.gaze.sample_at(t);
                s.t = t;
                s
            })
            .collect();
        let base = GazeTrace::new(samples).expect("uniform cadence is monotone");
        inject_gaze_noise(
            &base,
            &GazeNoiseParams { sigma_deg: tc.noise_sigma_deg, seed: tc.trial_seed },
        )
    }

    /// Run the full per-frame pipeline for one trial: stimulus → preprocess
    /// → gaze shift → electrode sampling → raster mask → spatial model →
    /// temporal dynamics. Returns the percept stream (raw brightness) and a
    /// partial record (prediction and fidelity are filled by the caller).
    pub fn run_trial(&self, tc: &TrialConfig) -> Result<(FrameStream, TrialRecord)> {
        let stim = stimuli::generate(&tc.stimulus, &self.cs)?;
        let schedule = self.cfg.build_schedule(tc.raster, tc.raster_seed)?;
        let bounds = self.bounds_for(&schedule);
        let trace = self.effective_trace(tc);
        let dt = stim.dt();
        let size = self.grid.size();
        let mut state = tc.temporal_enabled.then(|| TemporalState::zeros(size, size));
        let mut percepts = FrameStream::new(stim.frame_rate_hz);
        let mut b_i = Frame::new(size, size, 0.0);
        let mut frame_ms = Vec::with_capacity(stim.len());
        for (k, raw) in stim.frames.iter().enumerate() {
            let start = Instant::now();
            let pre = preprocess(raw, &self.cs);
            let shifted = gaze_shift(&pre, trace.sample_at(raw.t), &self.cs);
            let acts = sample_activations(&shifted, &self.array, &self.cs);
            let cursor = schedule.cursor(k);
            let masked = mask_by_raster(&acts, &schedule.active_set(cursor));
            let group_bounds = bounds.as_deref().map(|b| &b[cursor.current_group]);
            self.map.percept_into(&masked, group_bounds, &mut b_i)?;
            b_i.t = raw.t;
            let out = match &mut state {
                Some(state) => {
                    state.step(&b_i, dt, &self.temporal)?;
                    Frame::from_data(size, size, raw.t, state.b.clone())?
                }
                None => b_i.clone(),
            };
            frame_ms.push(start.elapsed().as_secs_f64() * 1e3);
            percepts.frames.push(out);
        }
        let coherence = stream_coherence(&percepts, self.grid.coordinate_system());
        let mean_frame_ms = frame_ms.iter().sum::<f64>() / frame_ms.len().max(1) as f64;
        let record = TrialRecord {
            condition: tc.raster,
            task: tc.stimulus.task,
            true_label: tc.stimulus.label(),
            predicted: None,
            per_frame_fidelity: Vec::new(),
            mean_fidelity: None,
            coherence,
            frame_ms,
            mean_frame_ms,
            trial_seed: tc.trial_seed,
        };
        Ok((percepts, record))
    }

    /// The eight stimuli of a task, using the config's timing and size.
    pub fn task_stimuli(&self, task: Task) -> Vec<StimulusSpec> {
        let base = self.cfg.stimulus_spec();
        match task {
            Task::Letter => LETTERS
                .iter()
                .map(|&l| StimulusSpec { task, letter: l, ..base })
                .collect(),
            Task::Motion => (0..DIRECTIONS)
                .map(|d| StimulusSpec { task, direction: d, ..base })
                .collect(),
        }
    }

    /// Letter templates: time-averaged no-raster percepts of the eight
    /// optotypes under the same spatial and temporal parameters, static
    /// central fixation, no gaze noise.
    pub fn letter_templates(&self) -> Result<Arc<Vec<Frame>>> {
        if let Some(t) = self.template_cache.lock().unwrap().as_ref() {
            return Ok(Arc::clone(t));
        }
        let mut templates = Vec::with_capacity(8);
        for spec in self.task_stimuli(Task::Letter) {
            let tc = TrialConfig {
                temporal_enabled: self.cfg.temporal.enabled,
                ..TrialConfig::new(spec, RasterKind::None, 0)
            };
            let (stream, _) = self.run_trial(&tc)?;
            templates.push(observer::time_average(&stream).ok_or_else(|| {
                Error::InvalidConfig("template stimulus produced an empty stream".into())
            })?);
        }
        let arc = Arc::new(templates);
        *self.template_cache.lock().unwrap() = Some(Arc::clone(&arc));
        Ok(arc)
    }

    /// Run one condition × task block: `trials_per_stimulus` repeats of each
    /// of the eight stimuli, observer predictions, fidelity against the
    /// matching no-raster baseline, and the confusion matrix.
    pub fn run_condition(
        &self,
        task: Task,
        condition: RasterKind,
        trials_per_stimulus: usize,
        master_seed: u64,
        mut dump: Option<&mut dyn FnMut(usize, &FrameStream, &TrialRecord)>,
    ) -> Result<ConditionResult> {
        if trials_per_stimulus == 0 {
            return Err(Error::InvalidConfig("at least one trial per stimulus".into()));
        }
        let templates = match task {
            Task::Letter => Some(self.letter_templates()?),
            Task::Motion => None,
        };
        let noise_sigma = self.cfg.gaze.noise_sigma_deg;
        let base_gaze = self.base_gaze()?;
        let mut confusion = ConfusionMatrix::default();
        let mut records = Vec::with_capacity(8 * trials_per_stimulus);
        let mut trial_index = 0usize;
        for (stim_idx, spec) in self.task_stimuli(task).into_iter().enumerate() {
            // no-raster baseline for fidelity; reused across repeats when the
            // gaze is deterministic
            let mut shared_baseline: Option<FrameStream> = None;
            for rep in 0..trials_per_stimulus {
                let seed = trial_seed(master_seed, task, condition, stim_idx, rep);
                let tc = TrialConfig {
                    stimulus: spec,
                    raster: condition,
                    raster_seed: seed,
                    gaze: base_gaze.clone(),
                    noise_sigma_deg: noise_sigma,
                    temporal_enabled: self.cfg.temporal.enabled,
                    trial_seed: seed,
                };
                let (percepts, mut record) = self.run_trial(&tc)?;
                let (per_frame, mean_fid) = if condition == RasterKind::None {
                    fidelity(&percepts, &percepts)?
                } else if noise_sigma > 0.0 {
                    // baseline must see the same noisy gaze to isolate raster cost
                    let base_tc = TrialConfig { raster: RasterKind::None, ..tc.clone() };
                    let (baseline, _) = self.run_trial(&base_tc)?;
                    fidelity(&percepts, &baseline)?
                } else {
                    if shared_baseline.is_none() {
                        let base_tc = TrialConfig {
                            raster: RasterKind::None,
                            ..tc.clone()
                        };
                        shared_baseline = Some(self.run_trial(&base_tc)?.0);
                    }
                    fidelity(&percepts, shared_baseline.as_ref().unwrap())?
                };
                let prediction = match &templates {
                    Some(t) => letter_observer(&percepts, t),
                    None => motion_observer(&percepts, self.grid.coordinate_system()),
                };
                record.predicted = Some(prediction);
                record.per_frame_fidelity = per_frame;
                record.mean_fidelity = Some(mean_fid);
                confusion.record(record.true_label, prediction);
                if let Some(dump) = dump.as_mut() {
                    dump(trial_index, &percepts, &record);
                }
                trial_index += 1;
                records.push(record);
            }
        }
        let mean_fidelity = records
            .iter()
            .filter_map(|r| r.mean_fidelity)
            .sum::<f64>()
            / records.len() as f64;
        Ok(ConditionResult {
            condition,
            task,
            accuracy: confusion.accuracy(),
            mean_fidelity,
            confusion,
            records,
        })
    }

    /// Run the configured sweep (tasks × conditions).
    pub fn run_sweep(&self, master_seed: u64) -> Result<Vec<ConditionResult>> {
        let mut out = Vec::new();
        for &task in &self.cfg.harness.tasks {
            for &condition in &self.cfg.harness.conditions {
                out.push(self.run_condition(
                    task,
                    condition,
                    self.cfg.harness.trials_per_stimulus,
                    master_seed,
                    None,
                )?);
            }
        }
        Ok(out)
    }

    /// Base gaze trace from the config (a recorded trace file or static
    /// central fixation).
    pub fn base_gaze(&self) -> Result<GazeTrace> {
        match &self.cfg.gaze.trace_path {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                    what: format!("gaze trace {path}"),
                    detail: e.to_string(),
                })?;
                GazeTrace::parse(&text)
            }
            None => Ok(GazeTrace::static_center()),
        }
    }
}

/// Per-trial CSV: `condition,task,true,pred,fidelity,coherence_mag,coherence_dir`.
pub fn trials_csv(results: &[ConditionResult]) -> String {
    let mut out = String::from("condition,task,true,pred,fidelity,coherence_mag,coherence_dir\n");
    for res in results {
        for r in &res.records {
            let pred = match r.predicted {
                Some(Prediction::Label(l)) => label_name(r.task, l),
                Some(Prediction::NoPercept) | None => "none".into(),
            };
            out.push_str(&format!(
                "{},{},{},{},{:.6},{:.6},{}\n",
                r.condition,
                r.task,
                label_name(r.task, r.true_label),
                pred,
                r.mean_fidelity.unwrap_or(f64::NAN),
                r.coherence.magnitude,
                r.coherence.compass().unwrap_or("none"),
            ));
        }
    }
    out
}

/// Plain-text per-condition summary table.
pub fn summary_text(results: &[ConditionResult]) -> String {
    let mut out = String::from(
        "condition      task    trials  accuracy  mean_fidelity  mean_frame_ms\n",
    );
    for r in results {
        let n = r.records.len();
        let mean_ms =
            r.records.iter().map(|t| t.mean_frame_ms).sum::<f64>() / n.max(1) as f64;
        out.push_str(&format!(
            "{:<14} {:<7} {:>6}  {:>8.3}  {:>13.4}  {:>13.3}\n",
            r.condition.to_string(),
            r.task.to_string(),
            n,
            r.accuracy,
            r.mean_fidelity,
            mean_ms,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn confusion_matrix_accounting() {
        let mut m = ConfusionMatrix::default();
        m.record(0, Prediction::Label(0));
        m.record(0, Prediction::Label(3));
        m.record(1, Prediction::NoPercept);
        assert_eq!(m.row_total(0), 2);
        assert_eq!(m.row_total(1), 1);
        assert_eq!(m.total(), 3);
        assert_eq!(m.correct(), 1);
        assert!((m.accuracy() - 1.0 / 3.0).abs() < 1e-12);
        let csv = m.to_csv(&label_names(Task::Letter));
        assert!(csv.starts_with("true\\pred,C,D,E,F,L,O,P,T,no_percept\n"));
        assert!(csv.contains("\nD,0,0,0,0,0,0,0,0,1\n"));
    }

    #[test]
    fn seeds_are_distinct_across_coordinates() {
        let mut seen = std::collections::HashSet::new();
        for task in [Task::Letter, Task::Motion] {
            for cond in RasterKind::ALL {
                for stim in 0..8 {
                    for rep in 0..6 {
                        assert!(seen.insert(trial_seed(42, task, cond, stim, rep)));
                    }
                }
            }
        }
    }

    #[test]
    fn label_names_cover_both_tasks() {
        assert_eq!(label_name(Task::Letter, 2), "E");
        assert_eq!(label_name(Task::Motion, 6), "down");
        assert_eq!(label_names(Task::Motion).len(), 8);
    }
}
