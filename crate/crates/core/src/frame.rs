//! Grayscale frames and timed frame streams.

use crate::error::{Error, Result};

/// A single grayscale image with a timestamp.
///
/// Stimulus and preprocessed frames keep intensities in [0, 1]; percept
/// frames carry raw model brightness, which may leave that range and is only
/// clamped when rendered to disk or display.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    /// Row-major intensities, `data[y * width + x]`.
    pub data: Vec<f64>,
    /// Seconds since stream start.
    pub t: f64,
}

impl Frame {
    pub fn new(width: usize, height: usize, t: f64) -> Self {
        Self { width, height, data: vec![0.0; width * height], t }
    }

    pub fn from_data(width: usize, height: usize, t: f64, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::ShapeMismatch(format!(
                "frame data length {} does not match {width}x{height}",
                data.len()
            )));
        }
        Ok(Self { width, height, data, t })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    /// Sum of all intensities.
    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    /// True when every intensity lies in [0, 1].
    pub fn in_unit_range(&self) -> bool {
        self.data.iter().all(|v| (0.0..=1.0).contains(v))
    }
}

/// A time-ordered sequence of frames at a fixed frame rate.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameStream {
    pub frames: Vec<Frame>,
    pub frame_rate_hz: f64,
}

impl FrameStream {
    pub fn new(frame_rate_hz: f64) -> Self {
        Self { frames: Vec::new(), frame_rate_hz }
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.frame_rate_hz
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Verify timestamps strictly increase.
    pub fn check_monotone(&self) -> Result<()> {
        for (i, pair) in self.frames.windows(2).enumerate() {
            if pair[1].t <= pair[0].t {
                return Err(Error::NonMonotoneTime {
                    index: i + 1,
                    t: pair[1].t,
                    prev: pair[0].t,
                });
            }
        }
        Ok(())
    }
}
