//! Temporal dynamics: per-pixel coupled leaky integrators producing
//! phosphene fading and persistence.
//!
//! The desensitization state `n` accumulates under sustained input and
//! suppresses the perceived brightness `b`:
//!
//! ```text
//! dn/dt = −τₙ·n + b_I        db/dt = −τ_b·b − α·n + b_I
//! ```
//!
//! The τ values act as multiplicative decay coefficients, i.e. rates in s⁻¹
//! (with the defaults, desensitization decays slowly and brightness responds
//! fast, which produces the fade-out under constant input). The alternative
//! reading of τ as time constants is selectable via [`UnitMode`] for
//! sensitivity analysis. States are advanced by explicit Euler once per
//! rendered frame; brightness is clamped to ≥ 0 at render time only, so the
//! state dynamics stay exactly linear.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameStream};

/// Largest stable Euler step for the default rates (1/5 s⁻¹ margin).
pub const MAX_DT: f64 = 0.05;

/// How the τ parameters enter the equations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum UnitMode {
    /// τ multiplies the state directly (decay rate in s⁻¹).
    #[default]
    Rate,
    /// The state decays as −x/τ (τ in seconds).
    TimeConstant,
}

impl fmt::Display for UnitMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitMode::Rate => "rate",
            UnitMode::TimeConstant => "time-constant",
        })
    }
}

impl FromStr for UnitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rate" => Ok(UnitMode::Rate),
            "time-constant" => Ok(UnitMode::TimeConstant),
            other => Err(Error::InvalidConfig(format!(
                "unknown unit mode {other:?} (expected rate or time-constant)"
            ))),
        }
    }
}

/// Coefficients of the coupled integrators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemporalParams {
    /// Desensitization decay (τₙ).
    pub tau_n: f64,
    /// Brightness decay (τ_b).
    pub tau_b: f64,
    /// Coupling of desensitization into brightness (α).
    pub alpha: f64,
    pub unit_mode: UnitMode,
}

impl TemporalParams {
    pub fn new(tau_n: f64, tau_b: f64, alpha: f64, unit_mode: UnitMode) -> Result<Self> {
        if !(tau_n > 0.0) || !(tau_b > 0.0) || !(alpha >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "temporal params need tau_n > 0, tau_b > 0, alpha >= 0 \
                 (got {tau_n}, {tau_b}, {alpha})"
            )));
        }
        Ok(Self { tau_n, tau_b, alpha, unit_mode })
    }

    /// Effective decay rates in s⁻¹ under the configured unit mode.
    pub fn rates(&self) -> (f64, f64) {
        match self.unit_mode {
            UnitMode::Rate => (self.tau_n, self.tau_b),
            UnitMode::TimeConstant => (1.0 / self.tau_n, 1.0 / self.tau_b),
        }
    }

    /// Equilibrium (n, b) under a constant input.
    pub fn equilibrium(&self, b_i: f64) -> (f64, f64) {
        let (rn, rb) = self.rates();
        let n = b_i / rn;
        (n, (b_i - self.alpha * n) / rb)
    }
}

impl Default for TemporalParams {
    fn default() -> Self {
        Self { tau_n: 0.2, tau_b: 5.0, alpha: 0.2, unit_mode: UnitMode::Rate }
    }
}

/// Per-pixel desensitization and brightness state.
#[derive(Clone, Debug, PartialEq)]
pub struct TemporalState {
    pub n: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
    width: usize,
    height: usize,
}

impl TemporalState {
    /// Zero state on a `width × height` grid.
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { n: vec![0.0; width * height], b: vec![0.0; width * height], t: 0.0, width, height }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// One forward-Euler step driven by the instantaneous brightness `b_i`.
    pub fn step(&mut self, b_i: &Frame, dt: f64, p: &TemporalParams) -> Result<()> {
        if !(dt > 0.0) || dt > MAX_DT {
            return Err(Error::TimeStep { dt, max: MAX_DT });
        }
        if b_i.width() != self.width || b_i.height() != self.height {
            return Err(Error::ShapeMismatch(format!(
                "input frame {}x{} does not match state {}x{}",
                b_i.width(),
                b_i.height(),
                self.width,
                self.height
            )));
        }
        let (rn, rb) = p.rates();
        for ((n, b), &u) in self.n.iter_mut().zip(self.b.iter_mut()).zip(&b_i.data) {
            let n_old = *n;
            *n += dt * (-rn * n_old + u);
            *b += dt * (-rb * *b - p.alpha * n_old + u);
        }
        self.t += dt;
        Ok(())
    }

    /// Brightness as a frame, clamped to ≥ 0 for rendering.
    pub fn render(&self) -> Frame {
        let mut f = Frame::new(self.width, self.height, self.t);
        for (o, &b) in f.data.iter_mut().zip(&self.b) {
            *o = b.max(0.0);
        }
        f
    }
}

/// Fold [`TemporalState::step`] over a stream of instantaneous-brightness
/// frames from a zero initial state. Output frames carry the raw (unclamped)
/// brightness so the dynamics stay linear; clamp at render time.
pub fn run_stream(frames: &FrameStream, p: &TemporalParams) -> Result<FrameStream> {
    frames.check_monotone()?;
    let mut out = FrameStream::new(frames.frame_rate_hz);
    let Some(first) = frames.frames.first() else {
        return Ok(out);
    };
    let mut state = TemporalState::zeros(first.width(), first.height());
    let mut prev_t = None;
    for f in &frames.frames {
        let dt = match prev_t {
            Some(t) => f.t - t,
            None => frames.dt(),
        };
        prev_t = Some(f.t);
        state.step(f, dt, p)?;
        out.frames.push(Frame::from_data(f.width(), f.height(), f.t, state.b.clone())?);
    }
    Ok(out)
}
