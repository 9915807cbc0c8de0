//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantities (visible under `cargo test -- --nocapture`).
//!
//! Heavy end-to-end sweeps are shared across tests through lazy statics, so
//! the suite runs each expensive computation once.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use rastersim_core::harness::stats::{binom_sf, cohens_d, median};
use rastersim_core::harness::{
    dot_course, gaze_error_stats, motion_observer, sample_target, stream_coherence, ConditionResult,
    Prediction, Simulation, TrialConfig,
};
use rastersim_core::pipeline::{inject_gaze_noise, mask_by_raster, ActivationVector, GazeNoiseParams,
    GazeTrace};
use rastersim_core::raster::coherence_of_order;
use rastersim_core::spatial::{AxonMap, AxonProvider, BuildOptions, PerceptGrid};
use rastersim_core::stimuli::{StimulusSpec, Task, LETTERS};
use rastersim_core::temporal::{run_stream, TemporalState};
use rastersim_core::{
    Frame, FrameStream, RasterKind, RasterSchedule, RunConfig, TemporalParams,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MASTER_SEED: u64 = 42;

/// Default-config simulation (10×10 array, 200×200 grids, ρ=300, λ=1000,
/// spiral axons, temporal on) plus its axon-map precompute time in seconds.
fn sim() -> &'static (Simulation, f64) {
    static SIM: OnceLock<(Simulation, f64)> = OnceLock::new();
    SIM.get_or_init(|| {
        let start = Instant::now();
        let sim = Simulation::new(RunConfig::default()).expect("default simulation");
        (sim, start.elapsed().as_secs_f64())
    })
}

/// The default evaluation sweep (both tasks × five conditions, 48 trials
/// per condition), shared by criteria 6 and the bias checks.
fn sweep() -> &'static Vec<ConditionResult> {
    static SWEEP: OnceLock<Vec<ConditionResult>> = OnceLock::new();
    SWEEP.get_or_init(|| sim().0.run_sweep(MASTER_SEED).expect("default sweep"))
}

fn default_array() -> rastersim_core::ElectrodeArray {
    RunConfig::default().build_array().unwrap()
}

fn make_schedule(kind: RasterKind, seed: u64) -> RasterSchedule {
    RunConfig::default().build_schedule(kind, seed).unwrap()
}

#[test]
fn acceptance_1_raster_structure() {
    let array = default_array();
    let start = Instant::now();
    for kind in [
        RasterKind::Horizontal,
        RasterKind::Vertical,
        RasterKind::Checkerboard,
        RasterKind::Random,
    ] {
        for seed in [0u64, 1, 99] {
            let s = make_schedule(kind, seed);
            assert_eq!(s.group_count(), 5, "{kind}");
            let mut seen = vec![false; 100];
            for g in s.groups() {
                assert_eq!(g.len(), 20, "{kind}: every group has exactly 20 electrodes");
                for &id in g {
                    assert!(!seen[id], "{kind}: electrode {id} in two groups");
                    seen[id] = true;
                }
            }
            assert!(seen.iter().all(|&v| v), "{kind}: groups cover all 100 electrodes");
        }
    }
    // within-group minimum distances, brute force: 1 grid unit for the
    // banded patterns, sqrt(5) grid units for the checkerboard
    let h = make_schedule(RasterKind::Horizontal, 0).min_within_group_distance(&array);
    let v = make_schedule(RasterKind::Vertical, 0).min_within_group_distance(&array);
    let cb = make_schedule(RasterKind::Checkerboard, 0).min_within_group_distance(&array);
    assert!((h - 400.0).abs() < 1e-9);
    assert!((v - 400.0).abs() < 1e-9);
    assert!((cb - 400.0 * 5f64.sqrt()).abs() < 1e-9);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "runtime {elapsed:.3}s exceeds 1s");
    eprintln!(
        "criterion 1 PASS: 5 disjoint groups of 20 covering 100 for all patterns; \
         min within-group distance h/v = 1 unit, checkerboard = sqrt(5) units ({cb:.1} um) \
         [{elapsed:.3}s]"
    );
}

#[test]
fn acceptance_2_apparent_motion_metric() {
    let array = default_array();
    let start = Instant::now();
    let h = make_schedule(RasterKind::Horizontal, 0).directional_coherence(&array);
    let v = make_schedule(RasterKind::Vertical, 0).directional_coherence(&array);
    assert!((h.magnitude - 0.6).abs() < 1e-9, "horizontal magnitude {}", h.magnitude);
    assert_eq!(h.compass(), Some("down"));
    assert!((v.magnitude - 0.6).abs() < 1e-9, "vertical magnitude {}", v.magnitude);
    assert_eq!(v.compass(), Some("right"));

    // checkerboard: chosen order attains the minimum over all 24 candidate
    // orders fixing group 0 first, and is strictly below 0.6
    let cb = make_schedule(RasterKind::Checkerboard, 0);
    let chosen = cb.directional_coherence(&array).magnitude;
    let mut best = f64::INFINITY;
    let mut orders = 0usize;
    let mut perm = [1usize, 2, 3, 4];
    // enumerate permutations via Heap's algorithm
    fn heap(k: usize, arr: &mut [usize; 4], visit: &mut impl FnMut(&[usize; 4])) {
        if k == 1 {
            visit(arr);
            return;
        }
        for i in 0..k {
            heap(k - 1, arr, visit);
            if k % 2 == 0 {
                arr.swap(i, k - 1);
            } else {
                arr.swap(0, k - 1);
            }
        }
    }
    heap(4, &mut perm, &mut |p| {
        let mut order = vec![0usize];
        order.extend_from_slice(p);
        best = best.min(coherence_of_order(cb.groups(), &order, &array).magnitude);
        orders += 1;
    });
    assert_eq!(orders, 24);
    assert!(chosen <= best + 1e-12, "chosen {chosen} vs exhaustive minimum {best}");
    assert!(chosen < 0.6);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 1.0, "runtime {elapsed:.3}s exceeds 1s");
    eprintln!(
        "criterion 2 PASS: coherence 0.6 down (horizontal), 0.6 right (vertical); \
         checkerboard {chosen:.3} = exhaustive minimum over 24 orders, < 0.6 [{elapsed:.3}s]"
    );
}

#[test]
fn acceptance_3_spatial_oracle() {
    let cfg = RunConfig::default();
    let array = cfg.build_array().unwrap();
    let params = cfg.spatial_params().unwrap();
    let start = Instant::now();
    // threshold 0 so the sparse structure stores every weight; thresholded
    // maps are covered by the looser module-level contract
    let options = BuildOptions { threshold: 0.0, ..BuildOptions::default() };
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for provider in [AxonProvider::Spiral, AxonProvider::Radial] {
        let grid = PerceptGrid::for_array(&array, &params, 20, cfg.sim.um_per_deg).unwrap();
        let map = AxonMap::build(&array, &grid, &params, provider, &options).unwrap();
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amps: Vec<f64> = (0..array.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            let got = map
                .instantaneous_percept(&ActivationVector { amplitudes: amps.clone() })
                .unwrap();
            let want =
                common::dense_axon_oracle(&array, &grid, &params, provider, &options, &amps);
            for (g, w) in got.data.iter().zip(&want) {
                worst = worst.max((g - w).abs());
            }
            cases += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert_eq!(cases, 100);
    assert!(worst < 1e-6, "worst abs deviation {worst:.3e} exceeds 1e-6");
    assert!(elapsed < 60.0, "runtime {elapsed:.1}s exceeds 1 min");
    eprintln!(
        "criterion 3 PASS: sparse evaluation matches dense brute force within {worst:.3e} \
         (< 1e-6) over 100 seeded cases on 20x20 grids [{elapsed:.1}s]"
    );
}

#[test]
fn acceptance_4_temporal_model() {
    let p = TemporalParams::default();
    let start = Instant::now();

    // analytic equilibrium with the paper's parameters: n* = b_I/tau_n = 5,
    // b* = (b_I - alpha*n*)/tau_b = 0
    let (n_star, b_star) = p.equilibrium(1.0);
    assert!((n_star - 5.0).abs() < 1e-12 && b_star.abs() < 1e-12);

    // constant input: transient rise then monotone fade toward 0
    let frames = 450;
    let mut stream = FrameStream::new(90.0);
    for k in 0..frames {
        let mut f = Frame::new(1, 1, k as f64 / 90.0);
        f.data[0] = 1.0;
        stream.frames.push(f);
    }
    let out = run_stream(&stream, &p).unwrap();
    let b: Vec<f64> = out.frames.iter().map(|f| f.data[0]).collect();
    let (peak_idx, peak) =
        b.iter().enumerate().fold((0, 0.0), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    assert!(peak > 0.1 && peak_idx > 10);
    for w in b[peak_idx..].windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "fade must be monotone");
    }

    // Euler at dt = 1/90 vs an RK4 reference at ~1e-4 s (112 substeps per
    // frame), full coupled state (n, b) in relative sup-norm over 5 s
    let dt = 1.0 / 90.0;
    let reference = common::rk4_reference(|_| 1.0, 0.2, 5.0, 0.2, 5.0, dt / 112.0, 112);
    let mut state = TemporalState::zeros(1, 1);
    let mut unit = Frame::new(1, 1, 0.0);
    unit.data[0] = 1.0;
    let (mut sup_diff, mut sup_ref) = (0.0f64, 0.0f64);
    let (mut sup_b_diff, mut sup_b_ref) = (0.0f64, 0.0f64);
    for (_, rn, rb) in &reference {
        state.step(&unit, dt, &p).unwrap();
        sup_diff = sup_diff.max((state.n[0] - rn).abs()).max((state.b[0] - rb).abs());
        sup_ref = sup_ref.max(rn.abs()).max(rb.abs());
        sup_b_diff = sup_b_diff.max((state.b[0] - rb).abs());
        sup_b_ref = sup_b_ref.max(rb.abs());
    }
    let state_ratio = sup_diff / sup_ref;
    assert!(state_ratio < 0.01, "state sup-norm ratio {state_ratio:.4} exceeds 1%");

    // linearity to 1e-9
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut u, mut v, mut w) =
        (FrameStream::new(90.0), FrameStream::new(90.0), FrameStream::new(90.0));
    let (c1, c2) = (0.7, 1.3);
    for k in 0..200 {
        let t = k as f64 / 90.0;
        let a: f64 = rng.gen_range(0.0..1.0);
        let b: f64 = rng.gen_range(0.0..1.0);
        u.frames.push(Frame::from_data(1, 1, t, vec![a]).unwrap());
        v.frames.push(Frame::from_data(1, 1, t, vec![b]).unwrap());
        w.frames.push(Frame::from_data(1, 1, t, vec![c1 * a + c2 * b]).unwrap());
    }
    let (ru, rv, rw) = (
        run_stream(&u, &p).unwrap(),
        run_stream(&v, &p).unwrap(),
        run_stream(&w, &p).unwrap(),
    );
    let mut lin_err = 0.0f64;
    for ((fu, fv), fw) in ru.frames.iter().zip(&rv.frames).zip(&rw.frames) {
        lin_err = lin_err.max((c1 * fu.data[0] + c2 * fv.data[0] - fw.data[0]).abs());
    }
    assert!(lin_err < 1e-9, "linearity deviation {lin_err:.2e}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0);
    eprintln!(
        "criterion 4 PASS: equilibrium (n*, b*) = (5, 0) exact; rise peak {peak:.3} then \
         monotone fade; Euler vs RK4 state sup-norm ratio {state_ratio:.5} < 1% \
         (brightness-only ratio {:.4}); linearity {lin_err:.1e} < 1e-9 [{elapsed:.1}s]",
        sup_b_diff / sup_b_ref
    );
}

/// Mean fidelity over the 8 letters for one raster pattern, against
/// per-letter no-raster baselines computed under identical settings.
fn letter_fidelities(sim: &Simulation, kind: RasterKind, seed: u64) -> Vec<f64> {
    LETTERS
        .iter()
        .enumerate()
        .map(|(i, &l)| {
            let spec = StimulusSpec::letter(l);
            let baseline_tc = TrialConfig::new(spec, RasterKind::None, 0);
            let (baseline, _) = sim.run_trial(&baseline_tc).unwrap();
            let tc = TrialConfig::new(spec, kind, seed.wrapping_add(i as u64 * 1000));
            let (stream, _) = sim.run_trial(&tc).unwrap();
            rastersim_core::harness::fidelity(&stream, &baseline).unwrap().1
        })
        .collect()
}

#[test]
fn acceptance_5_fidelity_ordering() {
    let (sim, _) = sim();
    let start = Instant::now();
    // the deterministic patterns do not depend on the seed (static gaze, no
    // noise); only the random pattern varies across the 10 seeds
    let cb = letter_fidelities(sim, RasterKind::Checkerboard, 1);
    let h = letter_fidelities(sim, RasterKind::Horizontal, 1);
    let v = letter_fidelities(sim, RasterKind::Vertical, 1);
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let (cb_m, h_m, v_m) = (mean(&cb), mean(&h), mean(&v));
    let mut rnd_all = Vec::new();
    let mut wins = 0usize;
    let seeds = 10u64;
    for seed in 0..seeds {
        let rnd = letter_fidelities(sim, RasterKind::Random, 777 + seed);
        let rnd_m = mean(&rnd);
        if cb_m > h_m && cb_m > v_m && cb_m > rnd_m {
            wins += 1;
        }
        rnd_all.extend(rnd);
    }
    let d_h = cohens_d(&cb, &h);
    let d_v = cohens_d(&cb, &v);
    let d_r = cohens_d(&cb, &rnd_all);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        wins >= 8,
        "checkerboard > (horizontal, vertical, random) held in only {wins}/10 seeds \
         (cb {cb_m:.3}, h {h_m:.3}, v {v_m:.3})"
    );
    assert!(elapsed < 600.0, "runtime {elapsed:.0}s exceeds 10 min");
    eprintln!(
        "criterion 5 PASS: fidelity ordering checkerboard > h, v, random in {wins}/10 seeds; \
         means cb {cb_m:.3}, h {h_m:.3}, v {v_m:.3}, random {:.3}; effect sizes d(cb-h) {d_h:.2}, \
         d(cb-v) {d_v:.2}, d(cb-random) {d_r:.2} [{elapsed:.0}s]",
        mean(&rnd_all)
    );
}

#[test]
fn acceptance_6_observer_orderings() {
    let start = Instant::now();
    let results = sweep();
    let acc = |task: Task, kind: RasterKind| -> f64 {
        results
            .iter()
            .find(|r| r.task == task && r.condition == kind)
            .map(|r| r.accuracy)
            .expect("condition present in sweep")
    };
    for r in results.iter() {
        assert_eq!(r.records.len(), 48, "48 trials per condition");
    }
    // ceiling check: no-raster motion discrimination is perfect
    let none_motion = acc(Task::Motion, RasterKind::None);
    assert!((none_motion - 1.0).abs() < 1e-12, "no-raster motion accuracy {none_motion}");
    // checkerboard ranks first among the raster patterns in both tasks
    for task in [Task::Letter, Task::Motion] {
        let cb = acc(task, RasterKind::Checkerboard);
        for other in [RasterKind::Horizontal, RasterKind::Vertical, RasterKind::Random] {
            assert!(
                cb > acc(task, other),
                "{task}: checkerboard {cb:.3} not above {other} {:.3}",
                acc(task, other)
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!(
        "criterion 6 PASS: accuracies letter (none {:.3}, h {:.3}, v {:.3}, cb {:.3}, rnd {:.3}) \
         motion (none {:.3}, h {:.3}, v {:.3}, cb {:.3}, rnd {:.3}); checkerboard first in both \
         tasks; no-raster motion 8/8 [{elapsed:.0}s]",
        acc(Task::Letter, RasterKind::None),
        acc(Task::Letter, RasterKind::Horizontal),
        acc(Task::Letter, RasterKind::Vertical),
        acc(Task::Letter, RasterKind::Checkerboard),
        acc(Task::Letter, RasterKind::Random),
        none_motion,
        acc(Task::Motion, RasterKind::Horizontal),
        acc(Task::Motion, RasterKind::Vertical),
        acc(Task::Motion, RasterKind::Checkerboard),
        acc(Task::Motion, RasterKind::Random),
    );
}

#[test]
fn acceptance_7_raster_bias() {
    let (sim, _) = sim();
    let start = Instant::now();

    // (a) percept coherence of a static uniform stimulus: down under
    // horizontal rastering, right under vertical, weaker under checkerboard
    let map = sim.axon_map();
    let grid = sim.percept_grid();
    let temporal = RunConfig::default().temporal_params().unwrap();
    let coherence_for = |kind: RasterKind| {
        let schedule = make_schedule(kind, 0);
        let mut state = TemporalState::zeros(grid.size(), grid.size());
        let mut stream = FrameStream::new(90.0);
        let uniform = ActivationVector { amplitudes: vec![1.0; 100] };
        for k in 0..180usize {
            let cursor = schedule.cursor(k);
            let masked = mask_by_raster(&uniform, &schedule.active_set(cursor));
            let mut b_i = map.instantaneous_percept(&masked).unwrap();
            b_i.t = k as f64 / 90.0;
            state.step(&b_i, 1.0 / 90.0, &temporal).unwrap();
            stream
                .frames
                .push(Frame::from_data(grid.size(), grid.size(), b_i.t, state.b.clone()).unwrap());
        }
        stream_coherence(&stream, grid.coordinate_system())
    };
    let ch = coherence_for(RasterKind::Horizontal);
    let cv = coherence_for(RasterKind::Vertical);
    let cc = coherence_for(RasterKind::Checkerboard);
    assert_eq!(ch.compass(), Some("down"), "horizontal percept sweep points down");
    assert_eq!(cv.compass(), Some("right"), "vertical percept sweep points right");
    assert!(
        cc.magnitude < ch.magnitude && cc.magnitude < cv.magnitude,
        "checkerboard percept coherence {} not below h {} / v {}",
        cc.magnitude,
        ch.magnitude,
        cv.magnitude
    );

    // (b) motion-observer confusions under horizontal rastering over-select
    // the downward bins (5, 6, 7) relative to the no-raster rate. With a
    // balanced design and the criterion-6 ceiling (8/8), the no-raster rate
    // is exactly 3/8. Gaze noise (Appendix-A calibration) varies the trials.
    let sigma = 1.904 / (std::f64::consts::PI / 2.0).sqrt();
    let n_trials = 200usize;
    let mut down = 0usize;
    let mut answered = 0usize;
    for i in 0..n_trials {
        let direction = i % 8;
        let tc = TrialConfig {
            noise_sigma_deg: sigma,
            ..TrialConfig::new(StimulusSpec::motion(direction), RasterKind::Horizontal, 5000 + i as u64)
        };
        let (stream, _) = sim.run_trial(&tc).unwrap();
        match motion_observer(&stream, grid.coordinate_system()) {
            Prediction::Label(l) => {
                answered += 1;
                if (5..=7).contains(&l) {
                    down += 1;
                }
            }
            Prediction::NoPercept => {}
        }
    }
    let p0 = 3.0 / 8.0;
    let p_value = binom_sf(down, answered, p0);
    let frac = down as f64 / answered as f64;
    assert!(
        p_value < 0.05,
        "downward over-selection not significant: {down}/{answered} (p = {p_value:.4})"
    );
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!(
        "criterion 7 PASS: static-stimulus percept coherence down (h, {:.3}) / right (v, {:.3}), \
         checkerboard {:.3} below both; horizontal-raster motion trials pick downward bins \
         {down}/{answered} = {frac:.3} vs no-raster 0.375, binomial p = {p_value:.2e} < 0.05 \
         [{elapsed:.0}s]",
        ch.magnitude, cv.magnitude, cc.magnitude
    );
}

#[test]
fn acceptance_8_gaze_statistics() {
    let start = Instant::now();
    // calibrate the isotropic noise to the appendix's mean angular error
    let sigma = 1.904 / (std::f64::consts::PI / 2.0).sqrt();
    let target = dot_course(11, 10_200.0); // ~1e5 samples at 0.1 s cadence
    let clean = sample_target(&target, 0.1);
    assert!(clean.len() >= 100_000);
    let noisy = inject_gaze_noise(
        &GazeTrace::new(clean).unwrap(),
        &GazeNoiseParams { sigma_deg: sigma, seed: 13 },
    );
    let stats = gaze_error_stats(&target, noisy.samples()).unwrap();
    assert!((stats.mean_deg - 1.904).abs() < 0.02, "mean error {:.3}", stats.mean_deg);
    // The spec window [0.92, 0.98] stems from an exponential-CDF slip; the
    // stated Rayleigh oracle at this calibration gives 1 - exp(-(5/sigma)^2/2)
    // = 0.9955. Assert the oracle value and report the discrepancy.
    let rayleigh = 1.0 - (-(5.0 / sigma).powi(2) / 2.0).exp();
    assert!(
        (stats.frac_below_5 - rayleigh).abs() < 0.005,
        "fraction below 5 deg {:.4} vs Rayleigh {rayleigh:.4}",
        stats.frac_below_5
    );
    assert!(stats.frac_below_5 >= 0.941, "at least as concentrated as the reported 94.1%");
    let literal_window = (0.92..=0.98).contains(&stats.frac_below_5);
    // fixation vs pursuit indistinguishable under time-invariant noise
    assert!(
        stats.fixation_vs_pursuit_p > 0.05,
        "fixation vs pursuit p = {:.4}",
        stats.fixation_vs_pursuit_p
    );
    assert!((stats.fixation_mean_deg - stats.pursuit_mean_deg).abs() < 0.05);
    let elapsed = start.elapsed().as_secs_f64();
    eprintln!(
        "criterion 8 PASS (documented deviation): mean {:.3} deg (target 1.904); fraction < 5 deg \
         {:.4} matches the Rayleigh oracle {rayleigh:.4} and exceeds the paper's 0.941; the \
         spec's literal [0.92, 0.98] window evaluates {} because its upper edge comes from \
         1-exp(-5/1.52) = 0.963 (exponential CDF) instead of the stated Rayleigh CDF; fixation \
         {:.3} vs pursuit {:.3} deg, p = {:.3} [{elapsed:.0}s]",
        stats.mean_deg,
        stats.frac_below_5,
        if literal_window { "GREEN" } else { "RED" },
        stats.fixation_mean_deg,
        stats.pursuit_mean_deg,
        stats.fixation_vs_pursuit_p,
    );
}

#[test]
fn acceptance_9_frame_budget() {
    let (sim, build_s) = sim();
    assert!(*build_s <= 60.0, "axon-map precompute took {build_s:.1}s (> 60s)");
    // hardest per-frame case: all 100 electrodes unmasked (no-raster),
    // temporal on, full 200x200 pipeline
    let tc = TrialConfig {
        stimulus: StimulusSpec {
            duration_s: 2.0,
            ..StimulusSpec::letter('E')
        },
        ..TrialConfig::new(StimulusSpec::letter('E'), RasterKind::None, 0)
    };
    let (_, record) = sim.run_trial(&tc).unwrap();
    let med_none = median(&record.frame_ms);
    // typical rastered frame for comparison
    let tc_cb = TrialConfig { raster: RasterKind::Checkerboard, ..tc.clone() };
    let (_, rec_cb) = sim.run_trial(&tc_cb).unwrap();
    let med_cb = median(&rec_cb.frame_ms);
    assert!(
        med_none <= 11.0,
        "median full-pipeline frame {med_none:.2} ms exceeds the 11 ms budget"
    );
    eprintln!(
        "criterion 9 PASS: axon-map precompute {build_s:.1}s (<= 60s); median full-pipeline \
         frame {med_none:.2} ms no-raster / {med_cb:.2} ms checkerboard (budget 11 ms, \
         {} frames)",
        record.frame_ms.len()
    );
}
