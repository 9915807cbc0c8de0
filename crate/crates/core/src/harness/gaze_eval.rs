//! Gaze-accuracy evaluation: angular error of a gaze trace against a target
//! trajectory, split by fixation vs pursuit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pipeline::{GazeSample, GazeTrace};

use super::stats::{mean_sd, welch_p};

/// Target speed below which a moment counts as fixation, °/s.
const FIXATION_SPEED: f64 = 0.05;

/// Summary of per-sample angular errors.
#[derive(Clone, Debug, PartialEq)]
pub struct GazeErrorStats {
    pub samples: usize,
    pub mean_deg: f64,
    pub sd_deg: f64,
    pub frac_below_5: f64,
    pub frac_below_3: f64,
    pub fixation_mean_deg: f64,
    pub fixation_sd_deg: f64,
    pub fixation_samples: usize,
    pub pursuit_mean_deg: f64,
    pub pursuit_sd_deg: f64,
    pub pursuit_samples: usize,
    /// Two-sided p-value for equal fixation/pursuit means.
    pub fixation_vs_pursuit_p: f64,
}

/// Piecewise-linear target position and speed at time `t`.
fn target_at(target: &[GazeSample], t: f64) -> (f64, f64, f64) {
    match target.iter().position(|s| s.t > t) {
        Some(0) => (target[0].x_deg, target[0].y_deg, 0.0),
        None => {
            let last = target.last().unwrap();
            (last.x_deg, last.y_deg, 0.0)
        }
        Some(i) => {
            let (a, b) = (&target[i - 1], &target[i]);
            let dt = b.t - a.t;
            let f = (t - a.t) / dt;
            let speed =
                ((b.x_deg - a.x_deg).powi(2) + (b.y_deg - a.y_deg).powi(2)).sqrt() / dt;
            (
                a.x_deg + (b.x_deg - a.x_deg) * f,
                a.y_deg + (b.y_deg - a.y_deg) * f,
                speed,
            )
        }
    }
}

/// Compare gaze samples against a target trajectory over their overlapping
/// time range. The target is interpolated linearly between its waypoints;
/// moments where it moves slower than [`FIXATION_SPEED`] count as fixation.
pub fn gaze_error_stats(target: &GazeTrace, gaze: &[GazeSample]) -> Result<GazeErrorStats> {
    let tw = target.samples();
    if tw.is_empty() || gaze.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let t0 = tw.first().unwrap().t.max(gaze.first().map(|s| s.t).unwrap_or(0.0));
    let t1 = tw.last().unwrap().t.min(gaze.last().map(|s| s.t).unwrap_or(0.0));
    let mut fixation = Vec::new();
    let mut pursuit = Vec::new();
    for s in gaze {
        if s.t < t0 || s.t > t1 {
            continue;
        }
        let (tx, ty, speed) = target_at(tw, s.t);
        let err = ((s.x_deg - tx).powi(2) + (s.y_deg - ty).powi(2)).sqrt();
        if speed < FIXATION_SPEED {
            fixation.push(err);
        } else {
            pursuit.push(err);
        }
    }
    let all: Vec<f64> = fixation.iter().chain(&pursuit).copied().collect();
    if all.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let (mean, sd) = mean_sd(&all);
    let (fm, fs) = mean_sd(&fixation);
    let (pm, ps) = mean_sd(&pursuit);
    let n = all.len() as f64;
    Ok(GazeErrorStats {
        samples: all.len(),
        mean_deg: mean,
        sd_deg: sd,
        frac_below_5: all.iter().filter(|&&e| e < 5.0).count() as f64 / n,
        frac_below_3: all.iter().filter(|&&e| e < 3.0).count() as f64 / n,
        fixation_mean_deg: fm,
        fixation_sd_deg: fs,
        fixation_samples: fixation.len(),
        pursuit_mean_deg: pm,
        pursuit_sd_deg: ps,
        pursuit_samples: pursuit.len(),
        fixation_vs_pursuit_p: if fixation.is_empty() || pursuit.is_empty() {
            f64::NAN
        } else {
            welch_p(fm, fs, fixation.len(), pm, ps, pursuit.len())
        },
    })
}

/// Synthetic follow-the-dot target: the dot rests 1.5 s at one of four
/// corners halfway between the screen center and its edges (±15°), then
/// glides to a different corner over 2.5 ± 0.5 s. Returned as waypoints for
/// linear interpolation.
pub fn dot_course(seed: u64, total_s: f64) -> GazeTrace {
    let corners = [(15.0, 15.0), (-15.0, 15.0), (-15.0, -15.0), (15.0, -15.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::new();
    let mut t = 0.0;
    let mut at = rng.gen_range(0..4usize);
    samples.push(GazeSample { t, x_deg: corners[at].0, y_deg: corners[at].1 });
    while t < total_s {
        // hold (fixation)
        t += 1.5;
        samples.push(GazeSample { t, x_deg: corners[at].0, y_deg: corners[at].1 });
        // glide to another corner (pursuit)
        let next = (at + rng.gen_range(1..4usize)) % 4;
        t += rng.gen_range(2.0..3.0);
        at = next;
        samples.push(GazeSample { t, x_deg: corners[at].0, y_deg: corners[at].1 });
    }
    GazeTrace::new(samples).expect("monotone by construction")
}

/// Evaluate a trace at a fixed cadence (the appendix measures every 0.1 s).
pub fn sample_target(target: &GazeTrace, dt: f64) -> Vec<GazeSample> {
    let tw = target.samples();
    if tw.is_empty() {
        return Vec::new();
    }
    let t0 = tw.first().unwrap().t;
    let t1 = tw.last().unwrap().t;
    let n = ((t1 - t0) / dt).floor() as usize;
    (0..=n)
        .map(|k| {
            let t = t0 + k as f64 * dt;
            let (x, y, _) = target_at(tw, t);
            GazeSample { t, x_deg: x, y_deg: y }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{inject_gaze_noise, GazeNoiseParams};

    #[test]
    fn perfect_gaze_has_zero_error() {
        let target = dot_course(1, 30.0);
        let gaze = sample_target(&target, 0.1);
        let stats = gaze_error_stats(&target, &gaze).unwrap();
        assert!(stats.mean_deg < 1e-12);
        assert_eq!(stats.frac_below_5, 1.0);
        assert_eq!(stats.frac_below_3, 1.0);
        assert!(stats.fixation_samples > 0 && stats.pursuit_samples > 0);
    }

    #[test]
    fn calibrated_noise_reproduces_rayleigh_statistics() {
        let sigma = 1.904 / (std::f64::consts::PI / 2.0).sqrt(); // mean -> 1.904 deg
        let target = dot_course(2, 2000.0);
        let clean = sample_target(&target, 0.1);
        let noisy = inject_gaze_noise(
            &GazeTrace::new(clean).unwrap(),
            &GazeNoiseParams { sigma_deg: sigma, seed: 7 },
        );
        let stats = gaze_error_stats(&target, noisy.samples()).unwrap();
        assert!((stats.mean_deg - 1.904).abs() < 0.05, "mean {}", stats.mean_deg);
        // Rayleigh CDF at 5 deg: 1 - exp(-(5/sigma)^2 / 2) = 0.9955
        let want = 1.0 - (-(5.0 / sigma).powi(2) / 2.0).exp();
        assert!((stats.frac_below_5 - want).abs() < 0.005, "frac {}", stats.frac_below_5);
        // time-invariant noise: fixation and pursuit match statistically
        assert!(stats.fixation_vs_pursuit_p > 0.05, "p {}", stats.fixation_vs_pursuit_p);
        assert!((stats.fixation_mean_deg - stats.pursuit_mean_deg).abs() < 0.05);
    }

    #[test]
    fn disjoint_ranges_rejected() {
        let target = dot_course(3, 10.0);
        let gaze = vec![GazeSample { t: 1e6, x_deg: 0.0, y_deg: 0.0 }];
        assert!(gaze_error_stats(&target, &gaze).is_err());
        assert!(gaze_error_stats(&target, &[]).is_err());
    }
}
