//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use skyclear::adaptive::{
    alpha_factor, align_calibration, estimate_light_profile, restore_adaptive, AlignOptions,
};
use skyclear::baseline::{fit_constant_radiance, restore_baseline, BaselineParams};
use skyclear::city::restore_city;
use skyclear::guided::GuidedFilterParams;
use skyclear::scattering::{
    emit_irradiance_curve, exp_integral_e1, irradiance_at_altitude,
    irradiance_at_altitude_quadrature,
};
use skyclear::sim::{
    make_synthetic_sky, ramp_profile, synthesize, synthetic_star_field, vertical_gradient,
    SceneLights, SimMode, SimScene,
};
use skyclear::{Atmosphere, CameraGeometry, DepthMap, GroundLightProfile, RadianceImage, SkyMask};

const C1_REL_TOL: f64 = 1e-9;
const C1_SAMPLES: usize = 1000;
const C1_SECONDS: f64 = 5.0;
const C2_REL_TOL: f64 = 1e-6;
const C2_PAIRS: usize = 100;
const C2_SECONDS: f64 = 10.0;
const C3_SECONDS: f64 = 1.0;
const C4_REL_TOL: f64 = 1e-8;
const C4_SAMPLES: usize = 100;
const C5_MAX_ABS: f64 = 1e-6;
const C5_SECONDS: f64 = 30.0;
const C6_PROFILE_REL: f64 = 0.02;
const C6_PROFILE_FLOOR: f64 = 0.05;
const C6_SKY_ABS: f64 = 0.02;
const C6_STAR_RADIUS: f64 = 5.0;
const C6_SECONDS: f64 = 60.0;
const C7_ADAPTIVE_MAX: f64 = 0.01;
const C7_BASELINE_MIN: f64 = 0.05;
const C9_BAND: usize = 5;

struct Verdict {
    pass: bool,
    detail: String,
}

/// Adaptive Simpson with Richardson correction; independent of the library quadrature.
fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let panels = 16;
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            step(f, lo, hi, fa, fm, fb, whole, tol / panels as f64, 24)
        })
        .sum()
}

/// `∫_u^∞ e^{-t}/t dt` via `t = u·e^v`, which turns it into `∫_0^∞ exp(-u·e^v) dv`.
fn e1_oracle(u: f64) -> f64 {
    let end = (1.0 + 800.0 / u).ln();
    let f = |v: f64| (-u * v.exp()).exp();
    // the integrand is at least e^{-u}·min(1, …) so its integral exceeds ~e^{-u}/(1+u)
    let scale = (-u).exp() / (1.0 + u);
    simpson(&f, 0.0, end, 1e-12 * scale)
}

/// `∫₀^L e^{-βτs} β e^{-βτ} dτ` by direct quadrature.
fn alpha_oracle(s: f64, beta: f64, path_m: f64) -> f64 {
    let k = beta * (1.0 + s);
    let end = if path_m.is_finite() { path_m } else { 45.0 / k };
    let f = |tau: f64| (-beta * tau * s).exp() * beta * (-beta * tau).exp();
    let guess = (1.0 - (-k * end).exp()) / (1.0 + s);
    simpson(&f, 0.0, end, 1e-12 * guess)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let (lo, hi) = (1e-4f64, 50.0f64);
    let mut worst: f64 = 0.0;
    for i in 0..C1_SAMPLES {
        let u = lo * (hi / lo).powf(i as f64 / (C1_SAMPLES - 1) as f64);
        worst = worst.max(rel(exp_integral_e1(u).unwrap(), e1_oracle(u)));
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        pass: worst <= C1_REL_TOL && secs < C1_SECONDS,
        detail: format!("max rel err {worst:.2e} (limit {C1_REL_TOL:.0e}) over {C1_SAMPLES} u, {secs:.2} s (limit {C1_SECONDS} s)"),
    }
}

fn criterion_2() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < C2_PAIRS {
        let beta = 10f64.powf(rng.random_range(2.8e-5f64.log10()..-2.0));
        let y = 10f64.powf(rng.random_range(0.0..20_000f64.log10()));
        if beta * y > 700.0 {
            continue;
        }
        let atm = Atmosphere::uniform(beta).unwrap();
        let closed = irradiance_at_altitude([1.0; 3], &atm, y).unwrap()[0];
        let quad = irradiance_at_altitude_quadrature([1.0; 3], &atm, y).unwrap()[0];
        worst = worst.max(rel(quad, closed));
        n += 1;
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        pass: worst <= C2_REL_TOL && secs < C2_SECONDS,
        detail: format!("max rel disagreement {worst:.2e} (limit {C2_REL_TOL:.0e}) over {C2_PAIRS} pairs, {secs:.2} s (limit {C2_SECONDS} s)"),
    }
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let betas = [Atmosphere::BETA_CLEAR, Atmosphere::BETA_SLIGHT_HAZE, Atmosphere::BETA_HAZE];
    let curves: Vec<_> = betas
        .iter()
        .map(|&b| emit_irradiance_curve([1.0; 3], &Atmosphere::uniform(b).unwrap(), 10.0, 1e5, 64).unwrap())
        .collect();
    let decreasing = curves
        .iter()
        .all(|c| c.values().windows(2).all(|w| w[1][0] < w[0][0]));
    let ordered = (0..64).all(|i| {
        curves[0].values()[i][0] > curves[1].values()[i][0]
            && curves[1].values()[i][0] > curves[2].values()[i][0]
    });
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        pass: decreasing && ordered && secs < C3_SECONDS,
        detail: format!("strictly decreasing: {decreasing}, strictly ordered by beta: {ordered}, {secs:.3} s (limit {C3_SECONDS} s)"),
    }
}

fn criterion_4() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let geom = CameraGeometry::new(640, 480, 640.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut infinite = 0;
    for _ in 0..C4_SAMPLES {
        let beta = 10f64.powf(rng.random_range(2.8e-5f64.log10()..-2.0));
        let (col, row) = (rng.random_range(0..640), rng.random_range(0..480));
        let path = if rng.random_bool(0.25) {
            infinite += 1;
            DepthMap::INFINITE
        } else {
            10f64.powf(rng.random_range(0.0..6.0))
        };
        let (x, y) = geom.pixel_coords(col, row);
        let s = geom.elevation_factor(x, y);
        let atm = Atmosphere::uniform(beta).unwrap();
        let closed = alpha_factor(&geom, &atm, x, y, path)[0];
        worst = worst.max(rel(closed, alpha_oracle(s, beta, path)));
    }
    Verdict {
        pass: worst <= C4_REL_TOL,
        detail: format!("max rel err {worst:.2e} (limit {C4_REL_TOL:.0e}) over {C4_SAMPLES} samples ({infinite} with infinite L)"),
    }
}

/// Bit patterns of every output a criterion produced, for the determinism check.
type Fingerprint = Vec<Vec<u64>>;

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn profile_bits(p: &GroundLightProfile) -> Vec<u64> {
    (0..3).flat_map(|c| bits(p.channel(c))).collect()
}

fn criterion_5() -> (Verdict, Fingerprint) {
    let start = Instant::now();
    let (w, h) = (256, 171);
    let skyline = 120;
    let sky = SkyMask::flat(w, h, skyline).unwrap();
    let sky_img = make_synthetic_sky(w, h, [0.02, 0.025, 0.04], [0.05, 0.05, 0.06], 20, 5).unwrap();
    let base = RadianceImage::from_fn(w, h, |c, x, y| {
        if sky.is_sky(x, y) { sky_img.get(c, x, y) } else { 0.01 + 0.005 * c as f64 }
    })
    .unwrap();
    let depth = DepthMap::from_fn(w, h, |x, y| if sky.is_sky(x, y) { DepthMap::INFINITE } else { 600.0 }).unwrap();
    let geom = CameraGeometry::with_default_focal(w, h).unwrap();
    let atm = Atmosphere::default();
    let a = [0.012, 0.009, 0.006];
    let scene = SimScene::new(base.clone(), SceneLights::Constant(a), atm, geom, depth.clone());
    let polluted = synthesize(&scene, SimMode::Baseline).unwrap();
    let params = BaselineParams::new(a, atm, geom, 1.0).unwrap();
    let out = restore_baseline(&polluted, &params, &depth).unwrap();
    let err = out
        .image
        .data()
        .iter()
        .zip(base.data())
        .map(|(r, b)| (r - b).abs())
        .fold(0.0, f64::max);
    let veil_mean = out.veil.mean();
    let secs = start.elapsed().as_secs_f64();
    let verdict = Verdict {
        pass: err <= C5_MAX_ABS && veil_mean > 0.0 && secs < C5_SECONDS,
        detail: format!("max abs err {err:.2e} (limit {C5_MAX_ABS:.0e}), mean veil {veil_mean:.4}, {secs:.2} s (limit {C5_SECONDS} s)"),
    };
    (verdict, vec![bits(polluted.data()), bits(out.image.data())])
}

fn criterion_6() -> (Verdict, Fingerprint) {
    let start = Instant::now();
    let (w, h) = (512, 341);
    let (top, bottom) = ([0.02, 0.022, 0.035], [0.045, 0.045, 0.055]);
    let (base_seed, calib_seed) = (61, 62);
    let base = make_synthetic_sky(w, h, top, bottom, 50, base_seed).unwrap();
    let calib = make_synthetic_sky(w, h, top, bottom, 50, calib_seed).unwrap();
    let truth = ramp_profile(w, [0.30, 0.25, 0.15], [0.50, 0.40, 0.25]).unwrap();
    let geom = CameraGeometry::new(w, h, 512.0).unwrap();
    let atm = Atmosphere::default();
    let depth = DepthMap::infinite(w, h);
    let scene = SimScene::new(base.clone(), SceneLights::Profile(truth.clone()), atm, geom, depth.clone());
    let polluted = synthesize(&scene, SimMode::Adaptive).unwrap();
    let sky = SkyMask::full_sky(w, h);
    let cal = align_calibration(&polluted, &sky, &calib, &sky, &AlignOptions::default()).unwrap();
    let profile = estimate_light_profile(&polluted, &cal, &geom, &atm).unwrap();
    let mut profile_err: f64 = 0.0;
    for c in 0..3 {
        for x in 0..w {
            let t = truth.at(c, x);
            if t > C6_PROFILE_FLOOR {
                profile_err = profile_err.max(rel(profile.at(c, x), t));
            }
        }
    }
    let restored = restore_adaptive(&polluted, &cal, &geom, &atm, &depth).unwrap();
    let stars = synthetic_star_field(w, h, 50, base_seed);
    let mut sky_err: f64 = 0.0;
    for y in 0..h {
        for x in 0..w {
            let near_star = stars
                .iter()
                .any(|s| (s.x - x as f64).hypot(s.y - y as f64) <= C6_STAR_RADIUS);
            if near_star {
                continue;
            }
            for c in 0..3 {
                sky_err = sky_err.max((restored.restoration.image.get(c, x, y) - base.get(c, x, y)).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let verdict = Verdict {
        pass: profile_err <= C6_PROFILE_REL && sky_err <= C6_SKY_ABS && secs < C6_SECONDS,
        detail: format!(
            "A(x) max rel err {profile_err:.4} (limit {C6_PROFILE_REL}), sky max abs err {sky_err:.4} (limit {C6_SKY_ABS}), {secs:.2} s (limit {C6_SECONDS} s)"
        ),
    };
    (
        verdict,
        vec![profile_bits(&profile), bits(restored.restoration.image.data())],
    )
}

/// Largest spread of column means over the top tenth of the frame, across channels.
fn top_band_spread(img: &RadianceImage) -> f64 {
    let (w, h) = img.dims();
    let rows = (h / 10).max(1);
    (0..3)
        .map(|c| {
            let means: Vec<f64> = (0..w)
                .map(|x| (0..rows).map(|y| img.get(c, x, y)).sum::<f64>() / rows as f64)
                .collect();
            let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .fold(0.0, f64::max)
}

fn criterion_7() -> (Verdict, Fingerprint) {
    let (w, h) = (384, 256);
    let (top, bottom) = ([0.02, 0.022, 0.035], [0.045, 0.045, 0.055]);
    let base = vertical_gradient(w, h, top, bottom).unwrap();
    let truth = ramp_profile(w, [0.05, 0.04, 0.03], [0.45, 0.36, 0.24]).unwrap();
    let geom = CameraGeometry::with_default_focal(w, h).unwrap();
    let atm = Atmosphere::default();
    let depth = DepthMap::infinite(w, h);
    let scene = SimScene::new(base.clone(), SceneLights::Profile(truth), atm, geom, depth.clone());
    let polluted = synthesize(&scene, SimMode::Adaptive).unwrap();
    let sky = SkyMask::full_sky(w, h);
    let cal = align_calibration(&polluted, &sky, &base, &sky, &AlignOptions::default()).unwrap();
    let adaptive = restore_adaptive(&polluted, &cal, &geom, &atm, &depth).unwrap();
    let a_const = fit_constant_radiance(&polluted, &cal, &atm, &geom, 1.0).unwrap();
    let params = BaselineParams::new(a_const, atm, geom, 1.0).unwrap();
    let baseline = restore_baseline(&polluted, &params, &depth).unwrap();
    let (sa, sb) = (top_band_spread(&adaptive.restoration.image), top_band_spread(&baseline.image));
    let verdict = Verdict {
        pass: sa <= C7_ADAPTIVE_MAX && sb >= C7_BASELINE_MIN,
        detail: format!(
            "top-band column-mean spread: adaptive {sa:.4} (limit <= {C7_ADAPTIVE_MAX}), baseline {sb:.4} (limit >= {C7_BASELINE_MIN}), fitted A = [{:.3}, {:.3}, {:.3}]",
            a_const[0], a_const[1], a_const[2]
        ),
    };
    (
        verdict,
        vec![bits(adaptive.restoration.image.data()), bits(baseline.image.data())],
    )
}

/// Sky over a flat ground band at finite depth, lit by a ramp of ground lights.
fn ground_scene(w: usize, h: usize, skyline: usize) -> (RadianceImage, RadianceImage, SkyMask, DepthMap) {
    let (top, bottom) = ([0.02, 0.022, 0.035], [0.045, 0.045, 0.055]);
    let sky = SkyMask::flat(w, h, skyline).unwrap();
    let gradient = vertical_gradient(w, h, top, bottom).unwrap();
    let base = RadianceImage::from_fn(w, h, |c, x, y| {
        if sky.is_sky(x, y) { gradient.get(c, x, y) } else { 0.015 + 0.005 * c as f64 }
    })
    .unwrap();
    let depth = DepthMap::from_fn(w, h, |x, y| if sky.is_sky(x, y) { DepthMap::INFINITE } else { 800.0 }).unwrap();
    (base, gradient, sky, depth)
}

fn criterion_8() -> (Verdict, Fingerprint) {
    let (w, h) = (256, 171);
    let (base, calib, sky, depth) = ground_scene(w, h, 120);
    let geom = CameraGeometry::with_default_focal(w, h).unwrap();
    let truth = ramp_profile(w, [0.2, 0.15, 0.1], [0.3, 0.25, 0.15]).unwrap();
    let scene = SimScene::new(base, SceneLights::Profile(truth), Atmosphere::default(), geom, depth.clone());
    let polluted = synthesize(&scene, SimMode::Adaptive).unwrap();
    let calib_sky = SkyMask::full_sky(w, h);
    let cal = align_calibration(&polluted, &sky, &calib, &calib_sky, &AlignOptions::default()).unwrap();
    let run = |beta: f64| {
        let atm = Atmosphere::uniform(beta).unwrap();
        restore_adaptive(&polluted, &cal, &geom, &atm, &depth).unwrap()
    };
    let (low, high) = (run(1e-4), run(1e-3));
    let (e_low, e_high) = (low.restoration.veil.total(), high.restoration.veil.total());
    let verdict = Verdict {
        pass: e_high > e_low,
        detail: format!("sum J: beta=1e-3 {e_high:.4} vs beta=1e-4 {e_low:.4}"),
    };
    (
        verdict,
        vec![bits(low.restoration.image.data()), bits(high.restoration.image.data())],
    )
}

/// Separable Gaussian blur with clamped borders.
fn blur(data: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-r..=r).map(|k| (-0.5 * (k as f64 / sigma).powi(2)).exp()).collect();
    let norm: f64 = kernel.iter().sum();
    let pass = |src: &[f64], along_x: bool| -> Vec<f64> {
        let mut out = vec![0.0; src.len()];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for (i, k) in kernel.iter().enumerate() {
                    let d = i as isize - r;
                    let (xx, yy) = if along_x {
                        ((x as isize + d).clamp(0, w as isize - 1) as usize, y)
                    } else {
                        (x, (y as isize + d).clamp(0, h as isize - 1) as usize)
                    };
                    acc += k * src[yy * w + xx];
                }
                out[y * w + x] = acc / norm;
            }
        }
        out
    };
    pass(&pass(data, true), false)
}

fn criterion_9() -> (Verdict, Fingerprint) {
    let (w, h) = (320, 200);
    // blocks of buildings with a sharp, stepped roofline
    let roof = |x: usize| [130usize, 112, 140, 100, 124, 135, 108, 146][x / 40];
    let building_depth = |x: usize| [300.0, 450.0, 250.0, 600.0, 350.0, 280.0, 500.0, 320.0][x / 40];
    let sky = SkyMask::new(h, (0..w).map(roof).collect()).unwrap();
    let (top, bottom) = ([0.02, 0.022, 0.035], [0.045, 0.045, 0.055]);
    let gradient = vertical_gradient(w, h, top, bottom).unwrap();
    let base = RadianceImage::from_fn(w, h, |c, x, y| {
        if sky.is_sky(x, y) { gradient.get(c, x, y) } else { 0.012 + 0.004 * c as f64 }
    })
    .unwrap();
    let truth_depth = DepthMap::from_fn(w, h, |x, y| if sky.is_sky(x, y) { DepthMap::INFINITE } else { building_depth(x) }).unwrap();
    let geom = CameraGeometry::with_default_focal(w, h).unwrap();
    let atm = Atmosphere::default();
    let lights = ramp_profile(w, [0.25, 0.2, 0.12], [0.4, 0.3, 0.2]).unwrap();
    let scene = SimScene::new(base.clone(), SceneLights::Profile(lights), atm, geom, truth_depth.clone());
    let polluted = synthesize(&scene, SimMode::Adaptive).unwrap();

    // A monocular estimate: disparity blurred across the skyline, sky at zero disparity.
    let disparity: Vec<f64> = truth_depth.as_slice().iter().map(|l| 1.0 / l).collect();
    let blurred = blur(&disparity, w, h, 3.0);
    let raw_depth = DepthMap::new(
        w,
        h,
        blurred.iter().map(|&d| if d > 1e-9 { 1.0 / d } else { DepthMap::INFINITE }).collect(),
    )
    .unwrap();

    let cal = align_calibration(&polluted, &sky, &gradient, &SkyMask::full_sky(w, h), &AlignOptions::default()).unwrap();
    let guided = restore_city(&polluted, &cal, &geom, &atm, &raw_depth, &GuidedFilterParams::default()).unwrap();
    let raw = restore_adaptive(&polluted, &cal, &geom, &atm, &raw_depth).unwrap();
    let band_error = |img: &RadianceImage| {
        let (mut sum, mut n) = (0.0, 0usize);
        for x in 0..w {
            let line = sky.skyline()[x];
            for y in line.saturating_sub(C9_BAND)..(line + C9_BAND).min(h) {
                for c in 0..3 {
                    sum += (img.get(c, x, y) - base.get(c, x, y)).abs();
                    n += 1;
                }
            }
        }
        sum / n as f64
    };
    let (eg, er) = (band_error(&guided.restoration.image), band_error(&raw.restoration.image));
    let verdict = Verdict {
        pass: eg < er,
        detail: format!("skyline-band mean abs err: guided {eg:.5} vs raw {er:.5}"),
    };
    (
        verdict,
        vec![bits(guided.depth.as_slice()), bits(guided.restoration.image.data()), bits(raw.restoration.image.data())],
    )
}

fn criterion_10(reference: &[Fingerprint]) -> Verdict {
    let available = std::thread::available_parallelism().map_or(4, |n| n.get());
    let many = available.max(3);
    let mut mismatches = Vec::new();
    for threads in [1, 2, many] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let prints = pool.install(|| {
            vec![criterion_5().1, criterion_6().1, criterion_7().1, criterion_8().1, criterion_9().1]
        });
        for (i, (a, b)) in prints.iter().zip(reference).enumerate() {
            if a != b {
                mismatches.push(format!("criterion {} at {threads} threads", i + 5));
            }
        }
    }
    Verdict {
        pass: mismatches.is_empty(),
        detail: if mismatches.is_empty() {
            format!("criteria 5-9 bit-identical at 1, 2 and {many} threads")
        } else {
            format!("differences: {}", mismatches.join(", "))
        },
    }
}

fn main() {
    let mut verdicts: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut report = |n: usize, name: &'static str, v: Verdict| {
        println!("criterion {n:>2} [{}] {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        verdicts.push((n, name, v));
    };
    report(1, "E1 accuracy", criterion_1());
    report(2, "disk integral vs closed form", criterion_2());
    report(3, "irradiance curve family", criterion_3());
    report(4, "alpha closed form", criterion_4());
    let mut prints = Vec::new();
    let (v, p) = criterion_5();
    prints.push(p);
    report(5, "baseline round trip", v);
    let (v, p) = criterion_6();
    prints.push(p);
    report(6, "adaptive round trip", v);
    let (v, p) = criterion_7();
    prints.push(p);
    report(7, "ablation", v);
    let (v, p) = criterion_8();
    prints.push(p);
    report(8, "beta sensitivity", v);
    let (v, p) = criterion_9();
    prints.push(p);
    report(9, "halo suppression", v);
    report(10, "determinism", criterion_10(&prints));
    let failed: Vec<usize> = verdicts.iter().filter(|v| !v.2.pass).map(|v| v.0).collect();
    println!("{} of {} criteria passed", verdicts.len() - failed.len(), verdicts.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
