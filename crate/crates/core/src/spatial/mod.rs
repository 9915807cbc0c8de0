//! Axon-map spatial model: converts electrode activations into an
//! instantaneous-brightness percept image.
//!
//! Epiretinal stimulation brightens pixels along the curved paths of retinal
//! ganglion cell axons. Each percept pixel owns the axon terminating at its
//! retinal location; the pixel's brightness is the maximum over the axon's
//! path points of the summed, amplitude-scaled electrode contributions
//! `a_e · exp(−d_e²/2ρ²) · exp(−d_soma²/2λ²)`, where `d_e` is the distance
//! from the path point to electrode `e` and `d_soma` the arc distance from
//! the point back to the cell body.

mod map;

pub use map::{AxonMap, BuildOptions, MaskBounds};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CoordinateSystem, ElectrodeArray};

/// Retinal position of the optic disc, µm (nasal of the fovea).
pub const OPTIC_DISC_UM: (f64, f64) = (4000.0, 0.0);

/// Sideways bow of the spiral provider's control point per µm of soma
/// elevation; 0 would reduce every path to the radial straight line.
const SPIRAL_BEND_PER_UM: f64 = 0.5;

/// Gaussian falloff scales of the axon map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialParams {
    /// Spread around the stimulating electrode, µm (ρ).
    pub rho_um: f64,
    /// Falloff along the axon from the cell body, µm (λ).
    pub lambda_um: f64,
}

impl SpatialParams {
    pub fn new(rho_um: f64, lambda_um: f64) -> Result<Self> {
        if !(rho_um > 0.0) || !(lambda_um > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "spatial params must be positive (got rho {rho_um}, lambda {lambda_um})"
            )));
        }
        Ok(Self { rho_um, lambda_um })
    }
}

impl Default for SpatialParams {
    fn default() -> Self {
        Self { rho_um: 300.0, lambda_um: 1000.0 }
    }
}

/// Axon trajectory model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxonProvider {
    /// Straight segment from the soma toward the optic disc.
    Radial,
    /// Quadratic arc bowing away from the horizontal meridian, curvature
    /// growing with the soma's |y|; degenerates to radial on the meridian.
    Spiral,
}

impl fmt::Display for AxonProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxonProvider::Radial => "radial",
            AxonProvider::Spiral => "spiral",
        })
    }
}

impl FromStr for AxonProvider {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(AxonProvider::Radial),
            "spiral" => Ok(AxonProvider::Spiral),
            other => Err(Error::InvalidConfig(format!(
                "unknown axon provider {other:?} (expected radial or spiral)"
            ))),
        }
    }
}

/// A discretized axon trajectory. The first vertex is the soma; vertices are
/// spaced exactly `step` µm apart in arc length.
#[derive(Clone, Debug, PartialEq)]
pub struct AxonPath {
    /// Polyline vertices in retinal µm.
    pub points: Vec<(f64, f64)>,
    /// Arc distance from each vertex back to the soma; `arc_dist[0] = 0`.
    pub arc_dist: Vec<f64>,
}

impl AxonPath {
    /// Angular position of the soma in retinal polar coordinates, degrees.
    pub fn theta_deg(&self) -> f64 {
        let (x, y) = self.points[0];
        y.atan2(x).to_degrees()
    }
}

/// Trace the axon leaving `soma`, discretized at `step` µm and truncated at
/// `max_len` µm of arc or at the optic disc, whichever comes first.
pub fn axon_path(
    soma: (f64, f64),
    provider: AxonProvider,
    step: f64,
    max_len: f64,
) -> Result<AxonPath> {
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("path step must be positive (got {step})")));
    }
    let path = match provider {
        AxonProvider::Radial => radial_path(soma, step, max_len),
        AxonProvider::Spiral => spiral_path(soma, step, max_len),
    };
    Ok(path)
}

fn radial_path(soma: (f64, f64), step: f64, max_len: f64) -> AxonPath {
    let (dx, dy) = (OPTIC_DISC_UM.0 - soma.0, OPTIC_DISC_UM.1 - soma.1);
    let total = (dx * dx + dy * dy).sqrt();
    if total == 0.0 {
        return AxonPath { points: vec![soma], arc_dist: vec![0.0] };
    }
    let (ux, uy) = (dx / total, dy / total);
    let reach = total.min(max_len);
    let n = (reach / step).floor() as usize;
    let mut points = Vec::with_capacity(n + 1);
    let mut arc_dist = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let d = k as f64 * step;
        points.push((soma.0 + ux * d, soma.1 + uy * d));
        arc_dist.push(d);
    }
    AxonPath { points, arc_dist }
}

/// Quadratic Bézier from the soma to the optic disc whose control point is
/// displaced perpendicular to the chord by `SPIRAL_BEND_PER_UM · soma.y`,
/// resampled to uniform arc-length steps.
fn spiral_path(soma: (f64, f64), step: f64, max_len: f64) -> AxonPath {
    let disc = OPTIC_DISC_UM;
    let (dx, dy) = (disc.0 - soma.0, disc.1 - soma.1);
    let chord = (dx * dx + dy * dy).sqrt();
    if chord == 0.0 {
        return AxonPath { points: vec![soma], arc_dist: vec![0.0] };
    }
    // unit normal of the chord, oriented so positive soma.y bows upward
    let (nx, ny) = (-dy / chord, dx / chord);
    let bow = SPIRAL_BEND_PER_UM * soma.1;
    let ctrl = (
        (soma.0 + disc.0) / 2.0 + nx * bow,
        (soma.1 + disc.1) / 2.0 + ny * bow,
    );
    let bezier = |t: f64| -> (f64, f64) {
        let u = 1.0 - t;
        (
            u * u * soma.0 + 2.0 * u * t * ctrl.0 + t * t * disc.0,
            u * u * soma.1 + 2.0 * u * t * ctrl.1 + t * t * disc.1,
        )
    };
    // walk the curve finely and emit vertices at exact arc multiples of step
    let fine = ((chord + 2.0 * bow.abs()) / step).ceil() as usize * 32 + 32;
    let mut points = vec![soma];
    let mut arc_dist = vec![0.0];
    let mut walked = 0.0;
    let mut next_emit = step;
    let mut prev = soma;
    for i in 1..=fine {
        let cur = bezier(i as f64 / fine as f64);
        let seg = ((cur.0 - prev.0).powi(2) + (cur.1 - prev.1).powi(2)).sqrt();
        while walked + seg >= next_emit && next_emit <= max_len {
            let f = (next_emit - walked) / seg;
            points.push((prev.0 + (cur.0 - prev.0) * f, prev.1 + (cur.1 - prev.1) * f));
            arc_dist.push(next_emit);
            next_emit += step;
        }
        walked += seg;
        prev = cur;
    }
    AxonPath { points, arc_dist }
}

/// The retinal pixel grid percepts are rendered on: `size × size` pixels
/// spanning the electrode array extent plus a 2ρ margin on every side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerceptGrid {
    cs: CoordinateSystem,
}

impl PerceptGrid {
    pub fn for_array(
        array: &ElectrodeArray,
        params: &SpatialParams,
        size: usize,
        um_per_deg: f64,
    ) -> Result<Self> {
        let extent = array.spacing_um()
            * (array.cols().max(array.rows()) as f64 - 1.0).max(1.0);
        let span_um = extent + 4.0 * params.rho_um;
        let cs = CoordinateSystem::new(um_per_deg, span_um / um_per_deg, size)?;
        Ok(Self { cs })
    }

    pub fn size(&self) -> usize {
        self.cs.image_size
    }

    pub fn span_um(&self) -> f64 {
        self.cs.deg_to_um(self.cs.fov_deg)
    }

    /// Coordinate system of the grid (shares the global y-flip convention).
    pub fn coordinate_system(&self) -> &CoordinateSystem {
        &self.cs
    }

    /// Retinal µm position of a pixel's center.
    pub fn pixel_center_um(&self, ix: usize, iy: usize) -> (f64, f64) {
        self.cs.px_to_um(ix as f64 + 0.5, iy as f64 + 0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn radial_path_is_straight_with_uniform_arc() {
        let p = axon_path((0.0, 0.0), AxonProvider::Radial, 100.0, 6000.0).unwrap();
        assert_eq!(p.points.len(), 41); // reaches the disc at 4000 um
        for (k, (pt, d)) in p.points.iter().zip(&p.arc_dist).enumerate() {
            assert!((pt.0 - k as f64 * 100.0).abs() < 1e-9);
            assert!(pt.1.abs() < 1e-9);
            assert!((d - k as f64 * 100.0).abs() < 1e-9);
        }
    }

    #[test]
    fn spiral_on_meridian_matches_radial() {
        let a = axon_path((-1500.0, 0.0), AxonProvider::Radial, 100.0, 3000.0).unwrap();
        let b = axon_path((-1500.0, 0.0), AxonProvider::Spiral, 100.0, 3000.0).unwrap();
        assert_eq!(a.points.len(), b.points.len());
        for (pa, pb) in a.points.iter().zip(&b.points) {
            assert!((pa.0 - pb.0).abs() < 1e-6);
            assert!((pa.1 - pb.1).abs() < 1e-6);
        }
    }

    #[test]
    fn spiral_bows_away_from_meridian() {
        let up = axon_path((0.0, 1200.0), AxonProvider::Spiral, 100.0, 3000.0).unwrap();
        // mid-path points lie above the straight chord from soma to disc
        let (sx, sy) = up.points[0];
        let mid = up.points[up.points.len() / 2];
        let chord_y = sy + (mid.0 - sx) / (OPTIC_DISC_UM.0 - sx) * (OPTIC_DISC_UM.1 - sy);
        assert!(mid.1 > chord_y + 1.0);
    }

    #[test]
    fn zero_max_len_keeps_only_the_soma() {
        let p = axon_path((500.0, -300.0), AxonProvider::Spiral, 100.0, 0.0).unwrap();
        assert_eq!(p.points, vec![(500.0, -300.0)]);
        assert_eq!(p.arc_dist, vec![0.0]);
    }

    #[test]
    fn percept_grid_span_and_centers() {
        let array = ElectrodeArray::build_grid(10, 10, 400.0).unwrap();
        let grid = PerceptGrid::for_array(&array, &SpatialParams::default(), 200, 3600.0 / 14.6)
            .unwrap();
        assert!((grid.span_um() - 4800.0).abs() < 1e-9);
        // center of the grid maps to the fovea
        let (x, y) = grid.pixel_center_um(99, 99);
        assert!(x < 0.0 && y > 0.0 && x.abs() < 24.0 && y.abs() < 24.0);
        // image y is down, retinal y is up
        let (_, top) = grid.pixel_center_um(100, 0);
        assert!(top > 2300.0);
    }

    proptest! {
        #[test]
        fn arc_dist_matches_cumulative_segment_lengths(
            x in -2400.0f64..2400.0,
            y in -2400.0f64..2400.0,
            spiral in proptest::bool::ANY,
        ) {
            let provider = if spiral { AxonProvider::Spiral } else { AxonProvider::Radial };
            let p = axon_path((x, y), provider, 150.0, 4500.0).unwrap();
            // oracle: cumulative sum of straight segment lengths
            let mut cum = 0.0;
            for i in 1..p.points.len() {
                let (x0, y0) = p.points[i - 1];
                let (x1, y1) = p.points[i];
                cum += ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
                prop_assert!((p.arc_dist[i] - cum).abs() < 1.0,
                    "vertex {i}: arc {} vs cumsum {cum}", p.arc_dist[i]);
                prop_assert!(p.arc_dist[i] > p.arc_dist[i - 1]);
            }
        }
    }
}
