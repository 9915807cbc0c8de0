//! Precomputed sparse weight map realizing the axon-map brightness equation
//! at interactive frame rates.
//!
//! Layout: pixels own path segments (in soma-outward order, so the axon
//! attenuation is non-increasing); each segment stores its attenuation `A`,
//! the electrodes whose Gaussian factor survives the weight threshold as
//! contiguous column runs of the electrode grid, and an upper bound `U` on
//! the sum of its Gaussian factors. Evaluation walks segments in order,
//! skipping any segment whose bound `A · max_amplitude · U` cannot beat the
//! pixel's current best and stopping once no remaining segment can.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::geometry::{ElectrodeArray, ElectrodeId};
use crate::pipeline::ActivationVector;

use super::{axon_path, AxonProvider, PerceptGrid, SpatialParams};

/// Discretization and sparsity controls for [`AxonMap::build`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BuildOptions {
    /// Arc-length spacing of path points, µm.
    pub path_step_um: f64,
    /// Maximum traced arc length per axon, µm.
    pub max_path_len_um: f64,
    /// Minimum stored weight `exp(−d_e²/2ρ²)·exp(−d_soma²/2λ²)`.
    pub threshold: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self { path_step_um: 100.0, max_path_len_um: 6000.0, threshold: 1e-3 }
    }
}

/// Precomputed sparse per-pixel, per-segment, per-electrode weights.
/// Immutable after build; evaluation is safe to call concurrently.
#[derive(Clone, Debug)]
pub struct AxonMap {
    grid: PerceptGrid,
    params: SpatialParams,
    provider: AxonProvider,
    options: BuildOptions,
    n_electrodes: usize,
    elec_cols: usize,

    /// Pixel -> segment index range (`n_pixels + 1` entries).
    px_seg_ptr: Vec<u32>,
    /// Axon attenuation `exp(−d_soma²/2λ²)` per segment.
    seg_axon: Vec<f64>,
    /// Path point index of each segment (0 = soma).
    seg_point: Vec<u16>,
    /// Round-up bound on the segment's summed Gaussian factors.
    seg_u: Vec<f32>,
    /// Segment -> block index range.
    seg_block_ptr: Vec<u32>,
    /// Segment -> gaussian value range.
    seg_g_ptr: Vec<u32>,
    /// First electrode id of each contiguous run.
    block_base: Vec<u16>,
    /// Electrodes in each run.
    block_len: Vec<u16>,
    /// Round-up sum of each run's Gaussian factors, for row-level pruning.
    block_sum: Vec<f32>,
    /// Gaussian factors, run-major.
    g: Vec<f32>,
    /// Per-pixel maximum of `seg_u` over its segments.
    px_umax: Vec<f32>,
}

/// Per-segment amplitude-sum bounds restricted to one active electrode set;
/// tightens evaluation pruning for masked activation vectors.
#[derive(Clone, Debug)]
pub struct MaskBounds {
    seg_u: Vec<f32>,
    px_umax: Vec<f32>,
}

struct SegTmp {
    axon: f64,
    point: u16,
    /// (first electrode id, length, gaussian sum) per contiguous run.
    blocks: Vec<(u16, u16, f32)>,
    gs: Vec<f32>,
}

fn round_up_f32(x: f64) -> f32 {
    let f = x as f32;
    if (f as f64) < x {
        f.next_up()
    } else {
        f
    }
}

impl AxonMap {
    /// Precompute the weight map for every percept pixel. Deterministic for
    /// fixed inputs regardless of thread count.
    pub fn build(
        array: &ElectrodeArray,
        grid: &PerceptGrid,
        params: &SpatialParams,
        provider: AxonProvider,
        options: &BuildOptions,
    ) -> Result<Self> {
        SpatialParams::new(params.rho_um, params.lambda_um)?;
        if !(options.path_step_um > 0.0) || options.max_path_len_um < 0.0 {
            return Err(Error::InvalidConfig("invalid axon path discretization".into()));
        }
        if !(options.threshold >= 0.0) {
            return Err(Error::InvalidConfig("weight threshold must be >= 0".into()));
        }
        let size = grid.size();
        let n_pixels = size * size;
        let two_rho2 = 2.0 * params.rho_um * params.rho_um;
        let two_lambda2 = 2.0 * params.lambda_um * params.lambda_um;
        let rows = array.rows();
        let cols = array.cols();
        let spacing = array.spacing_um();
        let row_center = (rows as f64 - 1.0) / 2.0;
        let col_center = (cols as f64 - 1.0) / 2.0;
        let th = options.threshold;

        let per_pixel: Vec<Vec<SegTmp>> = (0..n_pixels)
            .into_par_iter()
            .map(|px| {
                let soma = grid.pixel_center_um(px % size, px / size);
                let path = axon_path(soma, provider, options.path_step_um, options.max_path_len_um)
                    .expect("validated step");
                let mut segs = Vec::new();
                for (point, (&(sx, sy), &arc)) in
                    path.points.iter().zip(&path.arc_dist).enumerate()
                {
                    let axon = (-arc * arc / two_lambda2).exp();
                    // attenuation only shrinks along the path: nothing past
                    // this point can clear the threshold either
                    if axon <= th && point > 0 {
                        break;
                    }
                    // electrodes pass iff g·axon > th, i.e. d² < r²
                    let r2 = if th == 0.0 {
                        f64::INFINITY
                    } else {
                        two_rho2 * (axon / th).ln()
                    };
                    let mut blocks = Vec::new();
                    let mut gs = Vec::new();
                    if r2 > 0.0 {
                        let r = r2.sqrt().min(1e12);
                        let row_lo_f = (row_center - (sy + r) / spacing).ceil().max(0.0);
                        let row_hi_f =
                            (row_center - (sy - r) / spacing).floor().min(rows as f64 - 1.0);
                        let (row_lo, row_hi) = if row_hi_f < row_lo_f {
                            (1, 0) // empty window
                        } else {
                            (row_lo_f as usize, row_hi_f as usize)
                        };
                        for er in row_lo..=row_hi.min(rows - 1) {
                            let ey = (row_center - er as f64) * spacing;
                            let rem = r2 - (ey - sy) * (ey - sy);
                            if rem <= 0.0 {
                                continue;
                            }
                            let half = rem.sqrt();
                            let col_lo =
                                (col_center + (sx - half) / spacing).ceil().max(0.0) as usize;
                            let col_hi_f = (col_center + (sx + half) / spacing).floor();
                            if col_hi_f < col_lo as f64 {
                                continue;
                            }
                            let col_hi = (col_hi_f as usize).min(cols - 1);
                            let mut run_start = None;
                            let mut run_sum = 0.0f64;
                            for ec in col_lo..=col_hi {
                                let ex = (ec as f64 - col_center) * spacing;
                                let d2 = (ex - sx) * (ex - sx) + (ey - sy) * (ey - sy);
                                if d2 < r2 {
                                    if run_start.is_none() {
                                        run_start = Some(ec);
                                        run_sum = 0.0;
                                    }
                                    let gv = (-d2 / two_rho2).exp() as f32;
                                    gs.push(gv);
                                    run_sum += gv as f64;
                                } else if let Some(start) = run_start.take() {
                                    blocks.push((
                                        (er * cols + start) as u16,
                                        (ec - start) as u16,
                                        round_up_f32(run_sum * (1.0 + 1e-12)),
                                    ));
                                }
                            }
                            if let Some(start) = run_start {
                                blocks.push((
                                    (er * cols + start) as u16,
                                    (col_hi + 1 - start) as u16,
                                    round_up_f32(run_sum * (1.0 + 1e-12)),
                                ));
                            }
                        }
                    }
                    // the soma segment always exists, even with no entries
                    if !gs.is_empty() || point == 0 {
                        segs.push(SegTmp { axon, point: point as u16, blocks, gs });
                    }
                }
                segs
            })
            .collect();

        // stitch per-pixel results into flat arrays in pixel order
        let total_segs: usize = per_pixel.iter().map(|s| s.len()).sum();
        let total_blocks: usize =
            per_pixel.iter().flat_map(|s| s.iter().map(|t| t.blocks.len())).sum();
        let total_g: usize = per_pixel.iter().flat_map(|s| s.iter().map(|t| t.gs.len())).sum();
        let mut map = Self {
            grid: *grid,
            params: *params,
            provider,
            options: *options,
            n_electrodes: array.len(),
            elec_cols: cols,
            px_seg_ptr: Vec::with_capacity(n_pixels + 1),
            seg_axon: Vec::with_capacity(total_segs),
            seg_point: Vec::with_capacity(total_segs),
            seg_u: Vec::with_capacity(total_segs),
            seg_block_ptr: Vec::with_capacity(total_segs + 1),
            seg_g_ptr: Vec::with_capacity(total_segs + 1),
            block_base: Vec::with_capacity(total_blocks),
            block_len: Vec::with_capacity(total_blocks),
            block_sum: Vec::with_capacity(total_blocks),
            g: Vec::with_capacity(total_g),
            px_umax: Vec::with_capacity(n_pixels),
        };
        map.px_seg_ptr.push(0);
        map.seg_block_ptr.push(0);
        map.seg_g_ptr.push(0);
        for segs in per_pixel {
            let mut umax = 0.0f32;
            for seg in segs {
                let sum: f64 = seg.gs.iter().map(|&v| v as f64).sum();
                let u = round_up_f32(sum * (1.0 + 1e-12));
                umax = umax.max(u);
                map.seg_axon.push(seg.axon);
                map.seg_point.push(seg.point);
                map.seg_u.push(u);
                for (base, len, sum) in seg.blocks {
                    map.block_base.push(base);
                    map.block_len.push(len);
                    map.block_sum.push(sum);
                }
                map.g.extend_from_slice(&seg.gs);
                map.seg_block_ptr.push(map.block_base.len() as u32);
                map.seg_g_ptr.push(map.g.len() as u32);
            }
            map.px_seg_ptr.push(map.seg_axon.len() as u32);
            map.px_umax.push(umax);
        }
        Ok(map)
    }

    pub fn grid(&self) -> &PerceptGrid {
        &self.grid
    }

    pub fn params(&self) -> &SpatialParams {
        &self.params
    }

    pub fn provider(&self) -> AxonProvider {
        self.provider
    }

    pub fn options(&self) -> &BuildOptions {
        &self.options
    }

    pub fn n_electrodes(&self) -> usize {
        self.n_electrodes
    }

    pub fn n_segments(&self) -> usize {
        self.seg_axon.len()
    }

    pub fn n_entries(&self) -> usize {
        self.g.len()
    }

    /// Instantaneous percept brightness for an activation vector.
    pub fn instantaneous_percept(&self, a: &ActivationVector) -> Result<Frame> {
        let size = self.grid.size();
        let mut out = Frame::new(size, size, 0.0);
        self.percept_into(a, None, &mut out)?;
        Ok(out)
    }

    /// Evaluate into an existing frame, optionally with mask-specific bounds.
    pub fn percept_into(
        &self,
        a: &ActivationVector,
        bounds: Option<&MaskBounds>,
        out: &mut Frame,
    ) -> Result<()> {
        if a.len() != self.n_electrodes {
            return Err(Error::ShapeMismatch(format!(
                "activation vector has {} amplitudes for {} electrodes",
                a.len(),
                self.n_electrodes
            )));
        }
        let size = self.grid.size();
        if out.width() != size || out.height() != size {
            return Err(Error::ShapeMismatch(format!(
                "output frame {}x{} does not match {size}x{size} percept grid",
                out.width(),
                out.height()
            )));
        }
        let (seg_u, px_umax) = match bounds {
            Some(b) => (&b.seg_u, &b.px_umax),
            None => (&self.seg_u, &self.px_umax),
        };
        debug_assert_eq!(seg_u.len(), self.seg_axon.len());
        let amps = &a.amplitudes;
        let amax = amps.iter().cloned().fold(0.0f64, f64::max);
        if amax == 0.0 {
            out.data.fill(0.0);
            return Ok(());
        }
        // per-frame interval maxima of the amplitudes within each electrode
        // row: imax[(row*cols + start)*(cols+1) + len] = max(amps[start..start+len])
        // in that row. Lets the block-level bound see dark columns exactly.
        let cols = self.elec_cols;
        let n_rows = self.n_electrodes / cols;
        let mut imax = vec![0.0f64; n_rows * cols * (cols + 1)];
        for r in 0..n_rows {
            for start in 0..cols {
                let base = (r * cols + start) * (cols + 1);
                let mut m = 0.0f64;
                for len in 1..=(cols - start) {
                    let av = amps[r * cols + start + len - 1];
                    if av > m {
                        m = av;
                    }
                    imax[base + len] = m;
                }
            }
        }
        let px_seg_ptr = &self.px_seg_ptr;
        let seg_axon = &self.seg_axon;
        let seg_block_ptr = &self.seg_block_ptr;
        let seg_g_ptr = &self.seg_g_ptr;
        let block_base = &self.block_base;
        let block_len = &self.block_len;
        let block_sum = &self.block_sum;
        let g = &self.g;
        let elec_cols = self.elec_cols;

        out.data
            .par_chunks_mut(size)
            .enumerate()
            .for_each(|(row, out_row)| {
                for (col, out_px) in out_row.iter_mut().enumerate() {
                    let px = row * size + col;
                    let umax_bound = px_umax[px] as f64 * amax;
                    let mut best = 0.0f64;
                    let s0 = px_seg_ptr[px] as usize;
                    let s1 = px_seg_ptr[px + 1] as usize;
                    for s in s0..s1 {
                        let axon = seg_axon[s];
                        // nothing further along the axon can win
                        if axon * umax_bound < best {
                            break;
                        }
                        // coarse bound over the whole segment
                        if axon * (seg_u[s] as f64) * amax < best {
                            continue;
                        }
                        let b0 = seg_block_ptr[s] as usize;
                        let b1 = seg_block_ptr[s + 1] as usize;
                        // block-resolved bound: dark rows and columns drop out
                        let mut bound = 0.0f64;
                        for b in b0..b1 {
                            let base = block_base[b] as usize;
                            let len = block_len[b] as usize;
                            bound += imax[base * (elec_cols + 1) + len] * block_sum[b] as f64;
                        }
                        if axon * bound < best {
                            continue;
                        }
                        let mut t = 0.0f64;
                        let mut off = seg_g_ptr[s] as usize;
                        for b in b0..b1 {
                            let base = block_base[b] as usize;
                            let len = block_len[b] as usize;
                            for k in 0..len {
                                t += amps[base + k] * g[off + k] as f64;
                            }
                            off += len;
                        }
                        best = best.max(axon * t);
                    }
                    *out_px = best;
                }
            });
        Ok(())
    }

    /// Build pruning bounds for a fixed active electrode set.
    pub fn mask_bounds(&self, active: &[ElectrodeId]) -> MaskBounds {
        let mut is_active = vec![false; self.n_electrodes];
        for &id in active {
            if id < is_active.len() {
                is_active[id] = true;
            }
        }
        let n_segs = self.seg_axon.len();
        let mut seg_u = vec![0.0f32; n_segs];
        for s in 0..n_segs {
            let mut sum = 0.0f64;
            let mut off = self.seg_g_ptr[s] as usize;
            for b in self.seg_block_ptr[s] as usize..self.seg_block_ptr[s + 1] as usize {
                let base = self.block_base[b] as usize;
                let len = self.block_len[b] as usize;
                for k in 0..len {
                    if is_active[base + k] {
                        sum += self.g[off + k] as f64;
                    }
                }
                off += len;
            }
            seg_u[s] = round_up_f32(sum * (1.0 + 1e-12));
        }
        let n_pixels = self.px_umax.len();
        let mut px_umax = vec![0.0f32; n_pixels];
        for px in 0..n_pixels {
            let s0 = self.px_seg_ptr[px] as usize;
            let s1 = self.px_seg_ptr[px + 1] as usize;
            px_umax[px] = seg_u[s0..s1].iter().cloned().fold(0.0f32, f32::max);
        }
        MaskBounds { seg_u, px_umax }
    }

    /// Visit every stored entry; intended for tests and diagnostics.
    pub fn for_each_entry(&self, mut visit: impl FnMut(usize, u16, ElectrodeId, f32, f64)) {
        let n_pixels = self.px_umax.len();
        for px in 0..n_pixels {
            for s in self.px_seg_ptr[px] as usize..self.px_seg_ptr[px + 1] as usize {
                let mut off = self.seg_g_ptr[s] as usize;
                for b in self.seg_block_ptr[s] as usize..self.seg_block_ptr[s + 1] as usize {
                    let base = self.block_base[b] as usize;
                    for k in 0..self.block_len[b] as usize {
                        visit(px, self.seg_point[s], base + k, self.g[off + k], self.seg_axon[s]);
                        off += 1;
                    }
                }
            }
        }
    }

    /// Content hash identifying a build configuration; used as the cache key.
    pub fn cache_key(
        array: &ElectrodeArray,
        grid: &PerceptGrid,
        params: &SpatialParams,
        provider: AxonProvider,
        options: &BuildOptions,
    ) -> String {
        let cs = grid.coordinate_system();
        let meta = format!(
            "axonmap-v1 array={}x{}@{} grid={}x{} um_per_deg={} fov={} rho={} lambda={} \
             provider={provider} step={} max_len={} threshold={}",
            array.rows(),
            array.cols(),
            array.spacing_um(),
            grid.size(),
            grid.size(),
            cs.um_per_deg,
            cs.fov_deg,
            params.rho_um,
            params.lambda_um,
            options.path_step_um,
            options.max_path_len_um,
            options.threshold,
        );
        let mut hasher = Sha256::new();
        hasher.update(meta.as_bytes());
        hex_string(&hasher.finalize())
    }

    /// Serialize to `<dir>/<cache_key>.axonmap`.
    pub fn save_cache(&self, dir: &Path, key: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{key}.axonmap"));
        let mut w = BufWriter::new(fs::File::create(&path)?);
        w.write_all(b"RSAXMAP2")?;
        let key_bytes = key.as_bytes();
        w.write_all(&(key_bytes.len() as u64).to_le_bytes())?;
        w.write_all(key_bytes)?;
        for v in [
            self.grid.coordinate_system().um_per_deg,
            self.grid.coordinate_system().fov_deg,
            self.grid.size() as f64,
            self.params.rho_um,
            self.params.lambda_um,
            self.options.path_step_um,
            self.options.max_path_len_um,
            self.options.threshold,
            self.n_electrodes as f64,
            self.elec_cols as f64,
            matches!(self.provider, AxonProvider::Spiral) as u8 as f64,
        ] {
            w.write_all(&v.to_le_bytes())?;
        }
        write_u32s(&mut w, &self.px_seg_ptr)?;
        write_f64s(&mut w, &self.seg_axon)?;
        write_u16s(&mut w, &self.seg_point)?;
        write_f32s(&mut w, &self.seg_u)?;
        write_u32s(&mut w, &self.seg_block_ptr)?;
        write_u32s(&mut w, &self.seg_g_ptr)?;
        write_u16s(&mut w, &self.block_base)?;
        write_u16s(&mut w, &self.block_len)?;
        write_f32s(&mut w, &self.block_sum)?;
        write_f32s(&mut w, &self.g)?;
        write_f32s(&mut w, &self.px_umax)?;
        w.flush()?;
        Ok(path)
    }

    /// Load a previously saved map if one exists for `key`.
    pub fn load_cache(dir: &Path, key: &str) -> Result<Option<AxonMap>> {
        let path = dir.join(format!("{key}.axonmap"));
        if !path.exists() {
            return Ok(None);
        }
        let mut r = std::io::BufReader::new(fs::File::open(&path)?);
        let bad = |detail: &str| Error::Parse {
            what: format!("axon map cache {}", path.display()),
            detail: detail.into(),
        };
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != b"RSAXMAP2" {
            return Err(bad("bad magic"));
        }
        let key_len = read_u64(&mut r)? as usize;
        if key_len > 1024 {
            return Err(bad("oversized key"));
        }
        let mut key_bytes = vec![0u8; key_len];
        r.read_exact(&mut key_bytes)?;
        if key_bytes != key.as_bytes() {
            return Err(bad("cache key mismatch"));
        }
        let mut meta = [0.0f64; 11];
        for v in meta.iter_mut() {
            *v = read_f64(&mut r)?;
        }
        let size = meta[2] as usize;
        let cs = crate::geometry::CoordinateSystem::new(meta[0], meta[1], size)?;
        let map = AxonMap {
            grid: PerceptGrid { cs },
            params: SpatialParams { rho_um: meta[3], lambda_um: meta[4] },
            provider: if meta[10] != 0.0 { AxonProvider::Spiral } else { AxonProvider::Radial },
            options: BuildOptions {
                path_step_um: meta[5],
                max_path_len_um: meta[6],
                threshold: meta[7],
            },
            n_electrodes: meta[8] as usize,
            elec_cols: meta[9] as usize,
            px_seg_ptr: read_u32s(&mut r)?,
            seg_axon: read_f64s(&mut r)?,
            seg_point: read_u16s(&mut r)?,
            seg_u: read_f32s(&mut r)?,
            seg_block_ptr: read_u32s(&mut r)?,
            seg_g_ptr: read_u32s(&mut r)?,
            block_base: read_u16s(&mut r)?,
            block_len: read_u16s(&mut r)?,
            block_sum: read_f32s(&mut r)?,
            g: read_f32s(&mut r)?,
            px_umax: read_f32s(&mut r)?,
        };
        if map.px_seg_ptr.len() != size * size + 1 {
            return Err(bad("inconsistent pixel index"));
        }
        Ok(Some(map))
    }
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

macro_rules! rw_impl {
    ($write:ident, $read:ident, $ty:ty) => {
        fn $write(w: &mut impl Write, data: &[$ty]) -> Result<()> {
            w.write_all(&(data.len() as u64).to_le_bytes())?;
            let mut buf = Vec::with_capacity(data.len() * std::mem::size_of::<$ty>());
            for v in data {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
            Ok(())
        }

        fn $read(r: &mut impl Read) -> Result<Vec<$ty>> {
            const W: usize = std::mem::size_of::<$ty>();
            let len = read_u64(r)? as usize;
            let mut buf = vec![0u8; len * W];
            r.read_exact(&mut buf)?;
            Ok(buf
                .chunks_exact(W)
                .map(|c| <$ty>::from_le_bytes(c.try_into().unwrap()))
                .collect())
        }
    };
}

rw_impl!(write_u16s, read_u16s, u16);
rw_impl!(write_u32s, read_u32s, u32);
rw_impl!(write_f32s, read_f32s, f32);
rw_impl!(write_f64s, read_f64s, f64);

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
