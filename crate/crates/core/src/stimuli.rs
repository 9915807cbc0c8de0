//! Task stimuli: Snellen-style optotypes and moving bars.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameStream};
use crate::geometry::CoordinateSystem;

/// The eight optotypes used by the letter task.
pub const LETTERS: [char; 8] = ['C', 'D', 'E', 'F', 'L', 'O', 'P', 'T'];

/// Number of motion directions (45° steps, 0 = right, counterclockwise).
pub const DIRECTIONS: usize = 8;

/// Which task a stimulus belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Letter,
    Motion,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Letter => "letter",
            Task::Motion => "motion",
        })
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "letter" => Ok(Task::Letter),
            "motion" => Ok(Task::Motion),
            other => Err(Error::InvalidStimulus(format!(
                "unknown task {other:?} (expected letter or motion)"
            ))),
        }
    }
}

/// Full description of one stimulus presentation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StimulusSpec {
    pub task: Task,
    /// Optotype for the letter task.
    pub letter: char,
    /// Motion direction index, `0..8`, angle = index·45°, 0 = rightward.
    pub direction: usize,
    /// Presentation length in seconds.
    pub duration_s: f64,
    pub frame_rate_hz: f64,
    /// Letter height in degrees of visual angle.
    pub size_deg: f64,
}

impl StimulusSpec {
    pub fn letter(letter: char) -> Self {
        Self {
            task: Task::Letter,
            letter,
            direction: 0,
            duration_s: 5.0,
            frame_rate_hz: 90.0,
            size_deg: 41.112,
        }
    }

    pub fn motion(direction: usize) -> Self {
        Self {
            task: Task::Motion,
            letter: 'C',
            direction,
            duration_s: 5.0,
            frame_rate_hz: 90.0,
            size_deg: 41.112,
        }
    }

    pub fn frame_count(&self) -> usize {
        (self.duration_s * self.frame_rate_hz).round() as usize
    }

    /// Identity of the correct response: letter index or direction index.
    pub fn label(&self) -> usize {
        match self.task {
            Task::Letter => letter_index(self.letter).unwrap_or(0),
            Task::Motion => self.direction,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.duration_s > 0.0) || !(self.frame_rate_hz > 0.0) {
            return Err(Error::InvalidStimulus(format!(
                "duration and frame rate must be positive (got {} s at {} Hz)",
                self.duration_s, self.frame_rate_hz
            )));
        }
        match self.task {
            Task::Letter => {
                letter_index(self.letter).ok_or_else(|| {
                    Error::InvalidStimulus(format!(
                        "unsupported letter {:?} (expected one of {:?})",
                        self.letter, LETTERS
                    ))
                })?;
                if !(self.size_deg > 0.0) {
                    return Err(Error::InvalidStimulus("letter size must be positive".into()));
                }
            }
            Task::Motion => {
                if self.direction >= DIRECTIONS {
                    return Err(Error::InvalidStimulus(format!(
                        "direction index {} out of range 0..{}",
                        self.direction, DIRECTIONS
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Index of a letter in [`LETTERS`].
pub fn letter_index(letter: char) -> Option<usize> {
    LETTERS.iter().position(|&l| l == letter)
}

/// 5×5 stroke grids for the eight optotypes, row-major, top row first.
/// The groups {C, D, O} and {E, F, P} intentionally share most strokes.
const GLYPHS: [[u8; 25]; 8] = [
    // C
    [
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0, //
        1, 1, 1, 1, 1,
    ],
    // D
    [
        1, 1, 1, 1, 0, //
        1, 0, 0, 0, 1, //
        1, 0, 0, 0, 1, //
        1, 0, 0, 0, 1, //
        1, 1, 1, 1, 0,
    ],
    // E
    [
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 0, //
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 0, //
        1, 1, 1, 1, 1,
    ],
    // F
    [
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 0, //
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0,
    ],
    // L
    [
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0, //
        1, 1, 1, 1, 1,
    ],
    // O
    [
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 1, //
        1, 0, 0, 0, 1, //
        1, 0, 0, 0, 1, //
        1, 1, 1, 1, 1,
    ],
    // P
    [
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 1, //
        1, 1, 1, 1, 1, //
        1, 0, 0, 0, 0, //
        1, 0, 0, 0, 0,
    ],
    // T
    [
        1, 1, 1, 1, 1, //
        0, 0, 1, 0, 0, //
        0, 0, 1, 0, 0, //
        0, 0, 1, 0, 0, //
        0, 0, 1, 0, 0,
    ],
];

/// Render a static white-on-black optotype stream: the 5×5 stroke grid is
/// upscaled nearest-neighbor to the target pixel height and centered.
pub fn render_optotype(spec: &StimulusSpec, cs: &CoordinateSystem) -> Result<FrameStream> {
    spec.validate()?;
    if spec.task != Task::Letter {
        return Err(Error::InvalidStimulus("render_optotype requires a letter task spec".into()));
    }
    let glyph = &GLYPHS[letter_index(spec.letter).expect("validated")];
    let size = cs.image_size;
    let glyph_px = (spec.size_deg / cs.fov_deg * size as f64).round() as usize;
    let glyph_px = glyph_px.min(size).max(1);
    let offset = (size - glyph_px) / 2;

    let mut base = Frame::new(size, size, 0.0);
    // center-point sampling keeps the upscaled bitmap mirror-symmetric
    let src = |g: usize| (((g as f64 + 0.5) * 5.0) / glyph_px as f64) as usize;
    for gy in 0..glyph_px {
        let sy = src(gy);
        for gx in 0..glyph_px {
            if glyph[sy * 5 + src(gx)] == 1 {
                base.set(offset + gx, offset + gy, 1.0);
            }
        }
    }

    let mut stream = FrameStream::new(spec.frame_rate_hz);
    let dt = stream.dt();
    for k in 0..spec.frame_count() {
        let mut f = base.clone();
        f.t = k as f64 * dt;
        stream.frames.push(f);
    }
    Ok(stream)
}

/// Generate a moving-bar stream: a white stripe perpendicular to its motion
/// direction sweeps the full frame extent at constant speed over the trial.
///
/// The stripe is geometrically unbounded along its own axis (its length spans
/// the frame) and `bar_width_frac` of the frame side across it. Pixel
/// membership is evaluated at pixel centers in visual-degree space.
pub fn gen_moving_bar(spec: &StimulusSpec, cs: &CoordinateSystem) -> Result<FrameStream> {
    spec.validate()?;
    if spec.task != Task::Motion {
        return Err(Error::InvalidStimulus("gen_moving_bar requires a motion task spec".into()));
    }
    let size = cs.image_size;
    let n = spec.frame_count();
    let theta = (spec.direction as f64 * 45.0).to_radians();
    let (dir_x, dir_y) = (theta.cos(), theta.sin());
    // travel extent: projection of the square field onto the motion axis
    let extent = cs.fov_deg * (dir_x.abs() + dir_y.abs());
    let half_width = 0.5 * bar_width_frac() * cs.fov_deg;

    let mut stream = FrameStream::new(spec.frame_rate_hz);
    let dt = stream.dt();
    for k in 0..n {
        let u = -extent / 2.0 + (k as f64 + 0.5) / n as f64 * extent;
        let mut f = Frame::new(size, size, k as f64 * dt);
        for py in 0..size {
            for px in 0..size {
                let (x, y) = cs.px_to_deg(px as f64 + 0.5, py as f64 + 0.5);
                let along = x * dir_x + y * dir_y;
                if (along - u).abs() <= half_width {
                    f.set(px, py, 1.0);
                }
            }
        }
        stream.frames.push(f);
    }
    Ok(stream)
}

/// Bar width as a fraction of the frame side.
pub fn bar_width_frac() -> f64 {
    0.10
}

/// Dispatch on the spec's task.
pub fn generate(spec: &StimulusSpec, cs: &CoordinateSystem) -> Result<FrameStream> {
    match spec.task {
        Task::Letter => render_optotype(spec, cs),
        Task::Motion => gen_moving_bar(spec, cs),
    }
}
