//! Virtual observers: fixed algorithmic classifiers standing in for human
//! participants, plus the percept-fidelity and stream-coherence metrics.

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameStream};
use crate::geometry::CoordinateSystem;
use crate::raster::{bin_direction_8, Coherence};

use super::stats::pearson;

/// Observer outcome: a forced choice or an explicit no-percept report
/// (scored incorrect).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prediction {
    Label(usize),
    NoPercept,
}

impl Prediction {
    pub fn label(&self) -> Option<usize> {
        match self {
            Prediction::Label(l) => Some(*l),
            Prediction::NoPercept => None,
        }
    }
}

/// Time-average of a percept stream (raw brightness, no clamping).
pub fn time_average(percepts: &FrameStream) -> Option<Frame> {
    let first = percepts.frames.first()?;
    let mut avg = Frame::new(first.width(), first.height(), 0.0);
    for f in &percepts.frames {
        for (a, v) in avg.data.iter_mut().zip(&f.data) {
            *a += v;
        }
    }
    let n = percepts.len() as f64;
    for a in avg.data.iter_mut() {
        *a /= n;
    }
    Some(avg)
}

/// Letter observer: correlate the trial's time-averaged percept against
/// per-letter templates and pick the argmax. Ties break to the lowest letter
/// index; an all-zero (zero-variance) percept is an explicit no-percept.
pub fn letter_observer(percepts: &FrameStream, templates: &[Frame]) -> Prediction {
    let Some(avg) = time_average(percepts) else {
        return Prediction::NoPercept;
    };
    let mut best: Option<(usize, f64)> = None;
    for (i, tpl) in templates.iter().enumerate() {
        let Some(r) = pearson(&avg.data, &tpl.data) else {
            // zero variance on either side: no usable signal
            continue;
        };
        let better = match best {
            None => true,
            Some((_, br)) => r > br,
        };
        if better {
            best = Some((i, r));
        }
    }
    match best {
        Some((i, _)) => Prediction::Label(i),
        None => Prediction::NoPercept,
    }
}

/// Brightness-weighted centroid of a frame in visual degrees (negative
/// brightness is clamped to zero first). `None` when total brightness is
/// numerically zero.
fn centroid_deg(frame: &Frame, cs: &CoordinateSystem) -> Option<(f64, f64)> {
    let (mut sx, mut sy, mut m) = (0.0, 0.0, 0.0);
    for y in 0..frame.height() {
        for x in 0..frame.width() {
            let v = frame.get(x, y).max(0.0);
            if v > 0.0 {
                sx += v * (x as f64 + 0.5);
                sy += v * (y as f64 + 0.5);
                m += v;
            }
        }
    }
    if m <= 1e-12 {
        return None;
    }
    Some(cs.px_to_deg(sx / m, sy / m))
}

/// Mean unit displacement vector between consecutive frame centroids.
/// Returns the mean vector and the number of steps considered.
fn mean_drift(percepts: &FrameStream, cs: &CoordinateSystem) -> ([f64; 2], usize) {
    let centroids: Vec<(f64, f64)> = percepts
        .frames
        .iter()
        .filter_map(|f| centroid_deg(f, cs))
        .collect();
    if centroids.len() < 2 {
        return ([0.0, 0.0], 0);
    }
    let (mut mx, mut my) = (0.0, 0.0);
    let steps = centroids.len() - 1;
    for w in centroids.windows(2) {
        let (dx, dy) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
        let norm = (dx * dx + dy * dy).sqrt();
        // zero displacements contribute the zero vector
        if norm > 1e-12 {
            mx += dx / norm;
            my += dy / norm;
        }
    }
    ([mx / steps as f64, my / steps as f64], steps)
}

/// Motion observer: predict the 45°-bin of the circular mean of inter-frame
/// centroid displacements.
pub fn motion_observer(percepts: &FrameStream, cs: &CoordinateSystem) -> Prediction {
    let (mean, steps) = mean_drift(percepts, cs);
    if steps == 0 {
        return Prediction::NoPercept;
    }
    let norm = (mean[0] * mean[0] + mean[1] * mean[1]).sqrt();
    if norm <= 1e-12 {
        return Prediction::NoPercept;
    }
    Prediction::Label(bin_direction_8(mean[0], mean[1]))
}

/// Directional coherence of a percept stream: norm and direction of the mean
/// unit displacement between consecutive brightness centroids.
pub fn stream_coherence(percepts: &FrameStream, cs: &CoordinateSystem) -> Coherence {
    let (mean, steps) = mean_drift(percepts, cs);
    if steps == 0 {
        return Coherence { magnitude: 0.0, direction: [0.0, 0.0] };
    }
    let magnitude = (mean[0] * mean[0] + mean[1] * mean[1]).sqrt();
    let direction = if magnitude > 0.0 {
        [mean[0] / magnitude, mean[1] / magnitude]
    } else {
        [0.0, 0.0]
    };
    Coherence { magnitude, direction }
}

/// Mean per-frame Pearson correlation between two equally shaped streams.
/// Frames where either side has zero variance contribute 0. Returns the
/// per-frame values and their mean.
pub fn fidelity(rastered: &FrameStream, baseline: &FrameStream) -> Result<(Vec<f64>, f64)> {
    if rastered.len() != baseline.len() {
        return Err(Error::ShapeMismatch(format!(
            "fidelity needs equal stream lengths ({} vs {})",
            rastered.len(),
            baseline.len()
        )));
    }
    let mut values = Vec::with_capacity(rastered.len());
    for (a, b) in rastered.frames.iter().zip(&baseline.frames) {
        if a.data.len() != b.data.len() {
            return Err(Error::ShapeMismatch("fidelity frames differ in size".into()));
        }
        values.push(pearson(&a.data, &b.data).unwrap_or(0.0));
    }
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    Ok((values, mean))
}
