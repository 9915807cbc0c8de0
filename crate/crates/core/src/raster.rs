//! Timing-group partitions and their activation schedules.
//!
//! A raster pattern splits the electrode array into timing groups that are
//! stimulated in rapid succession, one group per dwell interval. Besides the
//! schedule itself this module provides two pattern metrics: the minimum
//! within-group electrode distance (spatial separation of simultaneously
//! active electrodes) and the directional coherence of the activation
//! sequence (how consistently the active-group centroid sweeps in one
//! direction, the mechanism behind raster-induced apparent motion).

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ElectrodeArray, ElectrodeId};

/// Spatial arrangement of the timing groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RasterKind {
    /// All electrodes active every frame (single group).
    None,
    /// Bands of adjacent rows, activated top to bottom.
    Horizontal,
    /// Bands of adjacent columns, activated left to right.
    Vertical,
    /// Modular lattice assignment maximizing within-group separation.
    Checkerboard,
    /// Seeded uniform shuffle, re-partitioned at the start of every cycle.
    Random,
}

impl RasterKind {
    pub const ALL: [RasterKind; 5] = [
        RasterKind::None,
        RasterKind::Horizontal,
        RasterKind::Vertical,
        RasterKind::Checkerboard,
        RasterKind::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RasterKind::None => "none",
            RasterKind::Horizontal => "horizontal",
            RasterKind::Vertical => "vertical",
            RasterKind::Checkerboard => "checkerboard",
            RasterKind::Random => "random",
        }
    }
}

impl fmt::Display for RasterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RasterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(RasterKind::None),
            "horizontal" => Ok(RasterKind::Horizontal),
            "vertical" => Ok(RasterKind::Vertical),
            "checkerboard" => Ok(RasterKind::Checkerboard),
            "random" => Ok(RasterKind::Random),
            other => Err(Error::InvalidConfig(format!(
                "unknown raster pattern {other:?} (expected none, horizontal, vertical, \
                 checkerboard or random)"
            ))),
        }
    }
}

/// Position within a schedule, derived from a frame index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScheduleCursor {
    pub frame_index: usize,
    /// Group id active at this frame (already mapped through the order).
    pub current_group: usize,
    /// Completed full cycles before this frame.
    pub cycle_index: usize,
}

/// Directional coherence of an activation sequence.
///
/// Magnitude is the norm of the mean unit displacement vector between
/// consecutive active-group centroids (including the wrap from last back to
/// first); 0 means no net sweep, 1 a perfectly consistent sweep. The
/// direction is the normalized mean, or (0, 0) when the magnitude vanishes.
/// Both use visual-field axes (+x right, +y up).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coherence {
    pub magnitude: f64,
    pub direction: [f64; 2],
}

impl Coherence {
    /// Compass name of the nearest 45° bin of the direction, `None` when the
    /// magnitude is zero.
    pub fn compass(&self) -> Option<&'static str> {
        if self.magnitude == 0.0 {
            return None;
        }
        Some(compass_name(bin_direction_8(self.direction[0], self.direction[1])))
    }
}

/// Nearest 45°-bin index (0 = right/east, counterclockwise) of a vector in
/// visual-field axes. Boundary ties round counterclockwise.
pub fn bin_direction_8(x: f64, y: f64) -> usize {
    let deg = y.atan2(x).to_degrees().rem_euclid(360.0);
    (((deg + 22.5) / 45.0).floor() as usize) % 8
}

/// Compass label for a 45°-bin index.
pub fn compass_name(bin: usize) -> &'static str {
    const NAMES: [&str; 8] = [
        "right",
        "up-right",
        "up",
        "up-left",
        "left",
        "down-left",
        "down",
        "down-right",
    ];
    NAMES[bin % 8]
}

/// A partition of the electrode array into timing groups plus their
/// activation order and dwell timing. Immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterSchedule {
    kind: RasterKind,
    /// Base partition (cycle 0 for the random kind), indexed by group id.
    groups: Vec<Vec<ElectrodeId>>,
    /// Activation sequence over group ids.
    order: Vec<usize>,
    dwell_frames: usize,
    seed: u64,
    n_electrodes: usize,
}

impl RasterSchedule {
    /// Construct a schedule for `kind` over `array`.
    ///
    /// `group_count` is ignored for the `none` kind, which always has a
    /// single group holding every electrode.
    pub fn make_pattern(
        kind: RasterKind,
        array: &ElectrodeArray,
        group_count: usize,
        dwell_frames: usize,
        seed: u64,
    ) -> Result<Self> {
        if dwell_frames == 0 {
            return Err(Error::InvalidConfig("dwell_frames must be >= 1".into()));
        }
        if group_count == 0 && kind != RasterKind::None {
            return Err(Error::InvalidConfig("group_count must be >= 1".into()));
        }
        let n = array.len();
        let (groups, order) = match kind {
            RasterKind::None => (vec![(0..n).collect::<Vec<_>>()], vec![0]),
            RasterKind::Horizontal => {
                let groups = banded_groups(array, group_count, /*by_rows=*/ true)?;
                (groups, (0..group_count).collect())
            }
            RasterKind::Vertical => {
                let groups = banded_groups(array, group_count, /*by_rows=*/ false)?;
                (groups, (0..group_count).collect())
            }
            RasterKind::Checkerboard => {
                let groups = lattice_groups(array, group_count)?;
                let order = best_order(&groups, array, group_count)?;
                (groups, order)
            }
            RasterKind::Random => {
                if n % group_count != 0 {
                    return Err(Error::Indivisible(format!(
                        "{n} electrodes cannot be split into {group_count} equal random groups"
                    )));
                }
                (random_partition(n, group_count, seed, 0), (0..group_count).collect())
            }
        };
        Ok(Self { kind, groups, order, dwell_frames, seed, n_electrodes: n })
    }

    pub fn kind(&self) -> RasterKind {
        self.kind
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn dwell_frames(&self) -> usize {
        self.dwell_frames
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Base partition, indexed by group id (cycle 0 for the random kind).
    pub fn groups(&self) -> &[Vec<ElectrodeId>] {
        &self.groups
    }

    /// Activation sequence over group ids.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Frames in one full cycle through all groups.
    pub fn cycle_frames(&self) -> usize {
        self.dwell_frames * self.group_count()
    }

    /// Cursor for a frame index.
    pub fn cursor(&self, frame_index: usize) -> ScheduleCursor {
        let step = frame_index / self.dwell_frames;
        let g = self.group_count();
        ScheduleCursor {
            frame_index,
            current_group: self.order[step % g],
            cycle_index: step / g,
        }
    }

    /// The partition in effect for a given cycle. Only the random kind
    /// re-partitions; all other kinds return the base partition.
    pub fn partition_for_cycle(&self, cycle: usize) -> Cow<'_, [Vec<ElectrodeId>]> {
        match self.kind {
            RasterKind::Random if cycle > 0 => Cow::Owned(random_partition(
                self.n_electrodes,
                self.group_count(),
                self.seed,
                cycle,
            )),
            _ => Cow::Borrowed(&self.groups),
        }
    }

    /// Electrode ids stimulated at the cursor's frame.
    pub fn active_set(&self, cursor: ScheduleCursor) -> Vec<ElectrodeId> {
        self.partition_for_cycle(cursor.cycle_index)[cursor.current_group].clone()
    }

    /// Minimum over groups of the minimum pairwise electrode distance within
    /// the group, in µm. Singleton groups contribute +∞. Evaluates the base
    /// partition.
    pub fn min_within_group_distance(&self, array: &ElectrodeArray) -> f64 {
        min_partition_distance(&self.groups, array)
    }

    /// Directional coherence of this schedule's activation sequence over the
    /// base partition.
    pub fn directional_coherence(&self, array: &ElectrodeArray) -> Coherence {
        coherence_of_order(&self.groups, &self.order, array)
    }
}

fn banded_groups(
    array: &ElectrodeArray,
    group_count: usize,
    by_rows: bool,
) -> Result<Vec<Vec<ElectrodeId>>> {
    let lanes = if by_rows { array.rows() } else { array.cols() };
    let what = if by_rows { "rows" } else { "columns" };
    if lanes % group_count != 0 {
        return Err(Error::Indivisible(format!(
            "{lanes} {what} cannot be split into {group_count} equal bands"
        )));
    }
    let per = lanes / group_count;
    let mut groups = vec![Vec::new(); group_count];
    for r in 0..array.rows() {
        for c in 0..array.cols() {
            let lane = if by_rows { r } else { c };
            groups[lane / per].push(array.id(r, c));
        }
    }
    Ok(groups)
}

/// Modular lattice assignment `group(r, c) = (r + 2c) mod G`; for G = 5 this
/// guarantees a within-group minimum distance of √5 grid units.
fn lattice_groups(array: &ElectrodeArray, group_count: usize) -> Result<Vec<Vec<ElectrodeId>>> {
    let mut groups = vec![Vec::new(); group_count];
    for r in 0..array.rows() {
        for c in 0..array.cols() {
            groups[(r + 2 * c) % group_count].push(array.id(r, c));
        }
    }
    let want = array.len() / group_count;
    if array.len() % group_count != 0 || groups.iter().any(|g| g.len() != want) {
        return Err(Error::Indivisible(format!(
            "checkerboard lattice over {}x{} does not split into {group_count} equal groups",
            array.rows(),
            array.cols()
        )));
    }
    Ok(groups)
}

/// Exhaustive search over activation orders fixing group 0 first, minimizing
/// coherence magnitude; ties resolve to the lexicographically smallest order.
fn best_order(
    groups: &[Vec<ElectrodeId>],
    array: &ElectrodeArray,
    group_count: usize,
) -> Result<Vec<usize>> {
    if group_count > 9 {
        return Err(Error::InvalidConfig(format!(
            "checkerboard order search is exhaustive and capped at 9 groups (got {group_count})"
        )));
    }
    let mut rest: Vec<usize> = (1..group_count).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    permute(&mut rest, 0, &mut |tail| {
        let mut order = Vec::with_capacity(group_count);
        order.push(0);
        order.extend_from_slice(tail);
        let mag = coherence_of_order(groups, &order, array).magnitude;
        let better = match &best {
            None => true,
            Some((m, o)) => mag < *m - 1e-12 || ((mag - *m).abs() <= 1e-12 && order < *o),
        };
        if better {
            best = Some((mag, order));
        }
    });
    Ok(best.expect("at least one order").1)
}

fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Coherence of a candidate activation order over a fixed partition.
pub fn coherence_of_order(
    groups: &[Vec<ElectrodeId>],
    order: &[usize],
    array: &ElectrodeArray,
) -> Coherence {
    let centroids: Vec<(f64, f64)> = order
        .iter()
        .map(|&g| {
            let grp = &groups[g];
            let (sx, sy) = grp
                .iter()
                .fold((0.0, 0.0), |(sx, sy), &id| {
                    let (x, y) = array.position(id);
                    (sx + x, sy + y)
                });
            (sx / grp.len() as f64, sy / grp.len() as f64)
        })
        .collect();
    if centroids.len() < 2 {
        return Coherence { magnitude: 0.0, direction: [0.0, 0.0] };
    }
    // displacements between consecutive centroids, wrapping last -> first
    let eps = array.spacing_um() * 1e-9;
    let n = centroids.len();
    let (mut mx, mut my) = (0.0, 0.0);
    for i in 0..n {
        let (x0, y0) = centroids[i];
        let (x1, y1) = centroids[(i + 1) % n];
        let (dx, dy) = (x1 - x0, y1 - y0);
        let norm = (dx * dx + dy * dy).sqrt();
        if norm > eps {
            mx += dx / norm;
            my += dy / norm;
        }
    }
    mx /= n as f64;
    my /= n as f64;
    let magnitude = (mx * mx + my * my).sqrt();
    let direction = if magnitude > 0.0 {
        [mx / magnitude, my / magnitude]
    } else {
        [0.0, 0.0]
    };
    Coherence { magnitude, direction }
}

/// Minimum within-group pairwise distance over an arbitrary partition, µm.
pub fn min_partition_distance(groups: &[Vec<ElectrodeId>], array: &ElectrodeArray) -> f64 {
    let mut min = f64::INFINITY;
    for grp in groups {
        for (i, &a) in grp.iter().enumerate() {
            let (xa, ya) = array.position(a);
            for &b in &grp[i + 1..] {
                let (xb, yb) = array.position(b);
                let d = ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt();
                min = min.min(d);
            }
        }
    }
    min
}

fn random_partition(
    n_electrodes: usize,
    group_count: usize,
    seed: u64,
    cycle: usize,
) -> Vec<Vec<ElectrodeId>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cycle as u64);
    let mut ids: Vec<ElectrodeId> = (0..n_electrodes).collect();
    ids.shuffle(&mut rng);
    let per = n_electrodes / group_count;
    ids.chunks(per).map(|c| c.to_vec()).collect()
}
