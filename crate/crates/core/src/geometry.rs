//! Electrode array construction and conversions among retinal micrometers,
//! visual degrees, and image pixels.
//!
//! Retinal and visual-field coordinates put the fovea at the origin with +x
//! rightward and +y upward. Image coordinates put the origin at the top-left
//! corner with +y downward; the y-flip between the two conventions happens in
//! exactly one place, [`CoordinateSystem::px_to_deg`] (and its inverse).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default retinal magnification in µm per degree of visual angle,
/// calibrated so a 10×10 array at 400 µm spacing (3600 µm extent) spans a
/// 14.6° field of view.
pub const DEFAULT_UM_PER_DEG: f64 = 3600.0 / 14.6;

/// Electrode id, row-major over the grid: `id = row * cols + col`.
pub type ElectrodeId = usize;

/// A regular grid of point-source electrodes in retinal coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectrodeArray {
    rows: usize,
    cols: usize,
    spacing_um: f64,
    positions: Vec<(f64, f64)>,
}

impl ElectrodeArray {
    /// Build a grid centered on the fovea. Row 0 is the top row (largest y),
    /// column 0 the leftmost (smallest x); total extent is
    /// `(cols-1)·spacing × (rows-1)·spacing`.
    pub fn build_grid(rows: usize, cols: usize, spacing_um: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig(format!(
                "electrode grid must have at least one row and column (got {rows}x{cols})"
            )));
        }
        if !(spacing_um > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "electrode spacing must be positive (got {spacing_um} um)"
            )));
        }
        let cx = (cols as f64 - 1.0) / 2.0;
        let cy = (rows as f64 - 1.0) / 2.0;
        let mut positions = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let x = (c as f64 - cx) * spacing_um;
                let y = (cy - r as f64) * spacing_um;
                positions.push((x, y));
            }
        }
        Ok(Self { rows, cols, spacing_um, positions })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing_um(&self) -> f64 {
        self.spacing_um
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Retinal position of an electrode in µm.
    pub fn position(&self, id: ElectrodeId) -> (f64, f64) {
        self.positions[id]
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    /// Row-major electrode id for a grid cell.
    pub fn id(&self, row: usize, col: usize) -> ElectrodeId {
        debug_assert!(row < self.rows && col < self.cols);
        row * self.cols + col
    }

    /// Inverse of [`Self::id`].
    pub fn row_col(&self, id: ElectrodeId) -> (usize, usize) {
        (id / self.cols, id % self.cols)
    }
}

/// Linear mapping among visual degrees, retinal µm, and image pixels.
///
/// Pixel coordinates are continuous: integer values land on cell corners and
/// the pixel `(ix, iy)` covers `[ix, ix+1) × [iy, iy+1)` with its center at
/// `(ix+0.5, iy+0.5)`. The image center of a `size`-pixel frame is at the
/// continuous coordinate `size/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoordinateSystem {
    /// Retinal magnification, µm per degree of visual angle.
    pub um_per_deg: f64,
    /// Field of view covered by the image, in degrees.
    pub fov_deg: f64,
    /// Image side length in pixels (square frames).
    pub image_size: usize,
}

impl CoordinateSystem {
    pub fn new(um_per_deg: f64, fov_deg: f64, image_size: usize) -> Result<Self> {
        if !(um_per_deg > 0.0) || !(fov_deg > 0.0) || image_size == 0 {
            return Err(Error::InvalidConfig(format!(
                "coordinate system requires positive magnification, fov and image size \
                 (got {um_per_deg} um/deg, {fov_deg} deg, {image_size} px)"
            )));
        }
        Ok(Self { um_per_deg, fov_deg, image_size })
    }

    /// Pixels per degree of visual angle.
    pub fn px_per_deg(&self) -> f64 {
        self.image_size as f64 / self.fov_deg
    }

    pub fn deg_to_um(&self, v: f64) -> f64 {
        v * self.um_per_deg
    }

    pub fn um_to_deg(&self, v: f64) -> f64 {
        v / self.um_per_deg
    }

    /// Continuous image coordinates to visual degrees. The image center maps
    /// to (0°, 0°); this is the single place where image y (down) flips to
    /// visual-field y (up).
    pub fn px_to_deg(&self, px: f64, py: f64) -> (f64, f64) {
        let half = self.image_size as f64 / 2.0;
        let scale = self.fov_deg / self.image_size as f64;
        ((px - half) * scale, -(py - half) * scale)
    }

    /// Visual degrees to continuous image coordinates; inverse of
    /// [`Self::px_to_deg`].
    pub fn deg_to_px(&self, x_deg: f64, y_deg: f64) -> (f64, f64) {
        let half = self.image_size as f64 / 2.0;
        let scale = self.image_size as f64 / self.fov_deg;
        (x_deg * scale + half, -y_deg * scale + half)
    }

    /// Retinal µm to continuous image coordinates.
    pub fn um_to_px(&self, x_um: f64, y_um: f64) -> (f64, f64) {
        self.deg_to_px(self.um_to_deg(x_um), self.um_to_deg(y_um))
    }

    /// Continuous image coordinates to retinal µm.
    pub fn px_to_um(&self, px: f64, py: f64) -> (f64, f64) {
        let (x, y) = self.px_to_deg(px, py);
        (self.deg_to_um(x), self.deg_to_um(y))
    }
}

impl Default for CoordinateSystem {
    /// 200×200 pixels over a 60° field of view at the default magnification.
    fn default() -> Self {
        Self { um_per_deg: DEFAULT_UM_PER_DEG, fov_deg: 60.0, image_size: 200 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grid_10x10_matches_array_extent() {
        let a = ElectrodeArray::build_grid(10, 10, 400.0).unwrap();
        assert_eq!(a.len(), 100);
        let xs: Vec<f64> = a.positions().iter().map(|p| p.0).collect();
        let ys: Vec<f64> = a.positions().iter().map(|p| p.1).collect();
        let extent_x = xs.iter().cloned().fold(f64::MIN, f64::max)
            - xs.iter().cloned().fold(f64::MAX, f64::min);
        let extent_y = ys.iter().cloned().fold(f64::MIN, f64::max)
            - ys.iter().cloned().fold(f64::MAX, f64::min);
        assert_eq!(extent_x, 3600.0);
        assert_eq!(extent_y, 3600.0);
    }

    #[test]
    fn grid_single_electrode_at_origin() {
        let a = ElectrodeArray::build_grid(1, 1, 400.0).unwrap();
        assert_eq!(a.positions(), &[(0.0, 0.0)]);
    }

    #[test]
    fn grid_2x2_at_quarter_spacing() {
        let a = ElectrodeArray::build_grid(2, 2, 400.0).unwrap();
        // row 0 is the top row (+y)
        assert_eq!(a.position(a.id(0, 0)), (-200.0, 200.0));
        assert_eq!(a.position(a.id(0, 1)), (200.0, 200.0));
        assert_eq!(a.position(a.id(1, 0)), (-200.0, -200.0));
        assert_eq!(a.position(a.id(1, 1)), (200.0, -200.0));
    }

    #[test]
    fn grid_rejects_degenerate_shapes() {
        assert!(ElectrodeArray::build_grid(0, 10, 400.0).is_err());
        assert!(ElectrodeArray::build_grid(10, 0, 400.0).is_err());
        assert!(ElectrodeArray::build_grid(10, 10, 0.0).is_err());
        assert!(ElectrodeArray::build_grid(10, 10, -1.0).is_err());
    }

    #[test]
    fn grid_centered_on_origin() {
        let a = ElectrodeArray::build_grid(10, 10, 400.0).unwrap();
        let (sx, sy) = a
            .positions()
            .iter()
            .fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x, sy + y));
        assert!(sx.abs() < 1e-9 && sy.abs() < 1e-9);
    }

    #[test]
    fn nearest_neighbor_distance_equals_spacing() {
        // brute-force pairwise check on the 10x10 grid
        let a = ElectrodeArray::build_grid(10, 10, 400.0).unwrap();
        for i in 0..a.len() {
            let (xi, yi) = a.position(i);
            let mut nearest = f64::INFINITY;
            for j in 0..a.len() {
                if i == j {
                    continue;
                }
                let (xj, yj) = a.position(j);
                nearest = nearest.min(((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt());
            }
            assert!((nearest - 400.0).abs() < 1e-9);
        }
    }

    #[test]
    fn id_row_col_bijective() {
        let a = ElectrodeArray::build_grid(7, 5, 100.0).unwrap();
        for id in 0..a.len() {
            let (r, c) = a.row_col(id);
            assert_eq!(a.id(r, c), id);
        }
    }

    #[test]
    fn default_magnification_spans_stated_fov() {
        let cs = CoordinateSystem::default();
        assert!((cs.deg_to_um(14.6) - 3600.0).abs() < 1e-9);
        assert_eq!(cs.deg_to_um(0.0), 0.0);
    }

    #[test]
    fn pixel_transform_examples() {
        let cs = CoordinateSystem::default();
        let (x, y) = cs.px_to_deg(100.0, 100.0);
        assert!(x.abs() < 1e-12 && y.abs() < 1e-12);
        // 100 px offset spans 30 degrees; 1 px spans 0.3 degrees
        let (x, _) = cs.px_to_deg(200.0, 100.0);
        assert!((x - 30.0).abs() < 1e-12);
        let (x, _) = cs.px_to_deg(101.0, 100.0);
        assert!((x - 0.3).abs() < 1e-12);
        // image y is down, visual y is up
        let (_, y) = cs.px_to_deg(100.0, 0.0);
        assert!((y - 30.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn transforms_round_trip(v in -100.0f64..100.0, py in -50.0f64..250.0) {
            let cs = CoordinateSystem::default();
            prop_assert!((cs.um_to_deg(cs.deg_to_um(v)) - v).abs() < 1e-9);
            let (px2, py2) = {
                let (x, y) = cs.px_to_deg(v + 100.0, py);
                cs.deg_to_px(x, y)
            };
            prop_assert!((px2 - (v + 100.0)).abs() < 1e-9);
            prop_assert!((py2 - py).abs() < 1e-9);
        }
    }
}
