//! Per-frame visual pipeline: preprocessing, gaze-contingent shift, gaze
//! noise, and electrode activation sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::geometry::{CoordinateSystem, ElectrodeArray, ElectrodeId};

/// Rec. 601 luminance weights used for the grayscale conversion.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// One gaze measurement: fixation direction relative to straight ahead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GazeSample {
    pub t: f64,
    pub x_deg: f64,
    pub y_deg: f64,
}

/// Isotropic angular gaze-noise model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GazeNoiseParams {
    /// Per-axis Gaussian scale in degrees.
    pub sigma_deg: f64,
    pub seed: u64,
}

/// A time-ordered gaze trace with zero-order-hold sampling.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct GazeTrace {
    samples: Vec<GazeSample>,
}

impl GazeTrace {
    pub fn new(samples: Vec<GazeSample>) -> Result<Self> {
        for (i, pair) in samples.windows(2).enumerate() {
            if pair[1].t <= pair[0].t {
                return Err(Error::NonMonotoneTime {
                    index: i + 1,
                    t: pair[1].t,
                    prev: pair[0].t,
                });
            }
        }
        Ok(Self { samples })
    }

    /// A single-sample trace holding central fixation forever.
    pub fn static_center() -> Self {
        Self { samples: vec![GazeSample { t: 0.0, x_deg: 0.0, y_deg: 0.0 }] }
    }

    pub fn samples(&self) -> &[GazeSample] {
        &self.samples
    }

    /// Zero-order hold: the sample in effect at time `t` (the last sample
    /// with `t_i <= t`; before the first sample, the first sample).
    pub fn sample_at(&self, t: f64) -> GazeSample {
        if self.samples.is_empty() {
            return GazeSample { t, x_deg: 0.0, y_deg: 0.0 };
        }
        match self.samples.partition_point(|s| s.t <= t) {
            0 => self.samples[0],
            n => self.samples[n - 1],
        }
    }

    /// Parse the plain-text trace format: a `t_s,x_deg,y_deg` header line
    /// followed by one comma-separated sample per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            what: "gaze trace".into(),
            detail: "empty file".into(),
        })?;
        if header.trim() != "t_s,x_deg,y_deg" {
            return Err(Error::Parse {
                what: "gaze trace".into(),
                detail: format!("expected header 't_s,x_deg,y_deg', got {header:?}"),
            });
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines {
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    what: "gaze trace".into(),
                    detail: format!("line {}: expected 3 fields, got {}", lineno + 1, fields.len()),
                });
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|e| Error::Parse {
                    what: "gaze trace".into(),
                    detail: format!("line {}: {e}", lineno + 1),
                })
            };
            samples.push(GazeSample {
                t: parse(fields[0])?,
                x_deg: parse(fields[1])?,
                y_deg: parse(fields[2])?,
            });
        }
        Self::new(samples)
    }

    /// Serialize to the plain-text trace format.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_s,x_deg,y_deg\n");
        for s in &self.samples {
            out.push_str(&format!("{:.6},{:.6},{:.6}\n", s.t, s.x_deg, s.y_deg));
        }
        out
    }
}

/// Add independent zero-mean isotropic 2-D Gaussian offsets of scale
/// `p.sigma_deg` to every sample. Deterministic given the seed.
pub fn inject_gaze_noise(trace: &GazeTrace, p: &GazeNoiseParams) -> GazeTrace {
    if p.sigma_deg == 0.0 {
        return trace.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let normal = Normal::new(0.0, p.sigma_deg).expect("sigma validated non-negative");
    let samples = trace
        .samples
        .iter()
        .map(|s| GazeSample {
            t: s.t,
            x_deg: s.x_deg + normal.sample(&mut rng),
            y_deg: s.y_deg + normal.sample(&mut rng),
        })
        .collect();
    GazeTrace { samples }
}

/// Per-electrode current amplitudes in [0, 1], indexed by electrode id.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationVector {
    pub amplitudes: Vec<f64>,
}

impl ActivationVector {
    pub fn zeros(n: usize) -> Self {
        Self { amplitudes: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Electrode ids with non-zero amplitude.
    pub fn support(&self) -> Vec<ElectrodeId> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, &a)| a > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Grayscale conversion for interleaved RGB data in [0, 1].
pub fn rgb_to_gray(width: usize, height: usize, rgb: &[f64]) -> Result<Frame> {
    if rgb.len() != width * height * 3 {
        return Err(Error::ShapeMismatch(format!(
            "rgb buffer length {} does not match {width}x{height}x3",
            rgb.len()
        )));
    }
    let data = rgb
        .chunks_exact(3)
        .map(|p| LUMA_WEIGHTS[0] * p[0] + LUMA_WEIGHTS[1] * p[1] + LUMA_WEIGHTS[2] * p[2])
        .collect();
    Frame::from_data(width, height, 0.0, data)
}

/// Preprocess a grayscale frame: area-averaged resample to
/// `image_size × image_size`, then a normalized 3×3 Gaussian (σ = 1) with
/// replicated edges. Constants map to themselves and values stay in [0, 1].
pub fn preprocess(raw: &Frame, cs: &CoordinateSystem) -> Frame {
    let resized = resize_area(raw, cs.image_size, cs.image_size);
    gaussian_3x3(&resized)
}

/// Coverage-weighted area resampling (exact box average for integer ratios).
fn resize_area(src: &Frame, out_w: usize, out_h: usize) -> Frame {
    if src.width() == out_w && src.height() == out_h {
        return src.clone();
    }
    let sx = src.width() as f64 / out_w as f64;
    let sy = src.height() as f64 / out_h as f64;
    let mut out = Frame::new(out_w, out_h, src.t);
    for oy in 0..out_h {
        let y0 = oy as f64 * sy;
        let y1 = (oy + 1) as f64 * sy;
        for ox in 0..out_w {
            let x0 = ox as f64 * sx;
            let x1 = (ox + 1) as f64 * sx;
            let mut acc = 0.0;
            let mut area = 0.0;
            let iy0 = y0.floor() as usize;
            let iy1 = (y1.ceil() as usize).min(src.height());
            let ix0 = x0.floor() as usize;
            let ix1 = (x1.ceil() as usize).min(src.width());
            for iy in iy0..iy1 {
                let wy = (y1.min((iy + 1) as f64) - y0.max(iy as f64)).max(0.0);
                for ix in ix0..ix1 {
                    let wx = (x1.min((ix + 1) as f64) - x0.max(ix as f64)).max(0.0);
                    acc += src.get(ix, iy) * wx * wy;
                    area += wx * wy;
                }
            }
            out.set(ox, oy, acc / area);
        }
    }
    out
}

/// Normalized 3×3 Gaussian blur with σ = 1 and replicated (clamped) edges.
fn gaussian_3x3(src: &Frame) -> Frame {
    let side = std::f64::consts::E.powf(-0.5);
    let corner = std::f64::consts::E.powf(-1.0);
    let z = 1.0 + 4.0 * side + 4.0 * corner;
    let k = [
        [corner / z, side / z, corner / z],
        [side / z, 1.0 / z, side / z],
        [corner / z, side / z, corner / z],
    ];
    let (w, h) = (src.width(), src.height());
    let mut out = Frame::new(w, h, src.t);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (dy, row) in k.iter().enumerate() {
                let sy = (y + dy).saturating_sub(1).min(h - 1);
                for (dx, &kv) in row.iter().enumerate() {
                    let sx = (x + dx).saturating_sub(1).min(w - 1);
                    acc += src.get(sx, sy) * kv;
                }
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Shift the frame so the gaze point lands on the image center (integer-pixel
/// translation, exposed borders filled with black). Gaze beyond ±fov/2 is
/// clamped.
pub fn gaze_shift(frame: &Frame, g: GazeSample, cs: &CoordinateSystem) -> Frame {
    let half_fov = cs.fov_deg / 2.0;
    let gx = g.x_deg.clamp(-half_fov, half_fov);
    let gy = g.y_deg.clamp(-half_fov, half_fov);
    let scale = cs.image_size as f64 / cs.fov_deg;
    let tx = (gx * scale).round() as isize;
    let ty = (-gy * scale).round() as isize;
    if tx == 0 && ty == 0 {
        return frame.clone();
    }
    let (w, h) = (frame.width() as isize, frame.height() as isize);
    let mut out = Frame::new(frame.width(), frame.height(), frame.t);
    for y in 0..h {
        let sy = y + ty;
        if sy < 0 || sy >= h {
            continue;
        }
        for x in 0..w {
            let sx = x + tx;
            if sx < 0 || sx >= w {
                continue;
            }
            out.set(x as usize, y as usize, frame.get(sx as usize, sy as usize));
        }
    }
    out
}

/// Sample electrode activations: each electrode's retinal position maps to
/// image coordinates and takes the intensity of the containing pixel (the
/// preprocessing blur supplies the neighborhood averaging). Electrodes
/// mapping outside the frame get 0.
pub fn sample_activations(
    frame: &Frame,
    array: &ElectrodeArray,
    cs: &CoordinateSystem,
) -> ActivationVector {
    let amplitudes = array
        .positions()
        .iter()
        .map(|&(ex, ey)| {
            let (px, py) = cs.um_to_px(ex, ey);
            let (ix, iy) = (px.floor(), py.floor());
            if ix < 0.0 || iy < 0.0 || ix >= frame.width() as f64 || iy >= frame.height() as f64 {
                0.0
            } else {
                frame.get(ix as usize, iy as usize)
            }
        })
        .collect();
    ActivationVector { amplitudes }
}

/// Zero every amplitude whose electrode is not in `active`.
pub fn mask_by_raster(a: &ActivationVector, active: &[ElectrodeId]) -> ActivationVector {
    let mut keep = vec![false; a.len()];
    for &id in active {
        if id < keep.len() {
            keep[id] = true;
        }
    }
    ActivationVector {
        amplitudes: a
            .amplitudes
            .iter()
            .zip(&keep)
            .map(|(&v, &k)| if k { v } else { 0.0 })
            .collect(),
    }
}
