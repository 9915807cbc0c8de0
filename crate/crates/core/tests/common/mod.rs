//! Independent oracles shared by the integration and acceptance suites.
//! Everything here is deliberately naive: straight loops, f64 throughout,
//! no sparsity, no pruning — independent of the implementation paths they
//! check.

use rastersim_core::geometry::ElectrodeArray;
use rastersim_core::spatial::{axon_path, AxonProvider, BuildOptions, PerceptGrid, SpatialParams};

/// Dense evaluation of the amplitude-scaled axon-map brightness: per pixel,
/// max over path points of Σ_e a_e·exp(−d_e²/2ρ²)·exp(−d_soma²/2λ²).
pub fn dense_axon_oracle(
    array: &ElectrodeArray,
    grid: &PerceptGrid,
    params: &SpatialParams,
    provider: AxonProvider,
    options: &BuildOptions,
    amps: &[f64],
) -> Vec<f64> {
    let size = grid.size();
    let two_rho2 = 2.0 * params.rho_um * params.rho_um;
    let two_lambda2 = 2.0 * params.lambda_um * params.lambda_um;
    let mut out = vec![0.0; size * size];
    for iy in 0..size {
        for ix in 0..size {
            let soma = grid.pixel_center_um(ix, iy);
            let path = axon_path(soma, provider, options.path_step_um, options.max_path_len_um)
                .expect("probe path");
            let mut best = 0.0f64;
            for (p, arc) in path.points.iter().zip(&path.arc_dist) {
                let axon = (-arc * arc / two_lambda2).exp();
                let mut sum = 0.0;
                for (e, &(ex, ey)) in array.positions().iter().enumerate() {
                    let d2 = (p.0 - ex).powi(2) + (p.1 - ey).powi(2);
                    sum += amps[e] * (-d2 / two_rho2).exp();
                }
                best = best.max(sum * axon);
            }
            out[iy * size + ix] = best;
        }
    }
    out
}

/// Classic RK4 on the two coupled integrators with a zero-order-held input.
/// Returns (n, b) sampled at `sample_every` steps.
pub fn rk4_reference(
    input: impl Fn(f64) -> f64,
    rate_n: f64,
    rate_b: f64,
    alpha: f64,
    total_s: f64,
    dt: f64,
    sample_every: usize,
) -> Vec<(f64, f64, f64)> {
    let deriv = |n: f64, b: f64, u: f64| (-rate_n * n + u, -rate_b * b - alpha * n + u);
    let (mut n, mut b) = (0.0f64, 0.0f64);
    let mut t = 0.0;
    let mut out = Vec::new();
    let steps = (total_s / dt).round() as usize;
    for k in 0..steps {
        let u = input(t);
        let (k1n, k1b) = deriv(n, b, u);
        let (k2n, k2b) = deriv(n + 0.5 * dt * k1n, b + 0.5 * dt * k1b, u);
        let (k3n, k3b) = deriv(n + 0.5 * dt * k2n, b + 0.5 * dt * k2b, u);
        let (k4n, k4b) = deriv(n + dt * k3n, b + dt * k3b, u);
        n += dt / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
        b += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        t += dt;
        if (k + 1) % sample_every == 0 {
            out.push((t, n, b));
        }
    }
    out
}

/// Brute-force nearest-pixel lookup for electrode activation sampling.
pub fn nearest_pixel_oracle(
    frame: &rastersim_core::Frame,
    array: &ElectrodeArray,
    cs: &rastersim_core::CoordinateSystem,
) -> Vec<f64> {
    array
        .positions()
        .iter()
        .map(|&(ex, ey)| {
            let x_deg = ex / cs.um_per_deg;
            let y_deg = ey / cs.um_per_deg;
            let px = x_deg * cs.image_size as f64 / cs.fov_deg + cs.image_size as f64 / 2.0;
            let py = -y_deg * cs.image_size as f64 / cs.fov_deg + cs.image_size as f64 / 2.0;
            let (ix, iy) = (px.floor(), py.floor());
            if ix < 0.0 || iy < 0.0 || ix >= frame.width() as f64 || iy >= frame.height() as f64 {
                0.0
            } else {
                frame.get(ix as usize, iy as usize)
            }
        })
        .collect()
}
