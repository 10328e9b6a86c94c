//! Spatially varying ground light.
//!
//! Lights are reduced to a profile `A(x)` along the horizon and treated as
//! collimated upward sources, giving `J(x, y) = A(x)·α(x, y)` with
//!
//! ```text
//! α = ∫₀^L e^{-βτs} β e^{-βτ} dτ = (1 - e^{-β(1+s)L}) / (1 + s)
//! ```
//!
//! `A(x)` is recovered by comparing a handful of high sky rows of the input with
//! the same rows of a pristine calibration sky, after quasi-quartile filtering
//! has removed stars from both.

use rayon::prelude::*;

use crate::baseline::check_geometry;
use crate::error::{Error, Result};
use crate::filters::{gaussian_smooth, quasi_quartile};
use crate::image::RadianceImage;
use crate::model::{Atmosphere, CameraGeometry, DepthMap};
use crate::profile::GroundLightProfile;
use crate::restore::{subtract_veil, Restoration};
use crate::skyline::SkyMask;

/// Default quasi-quartile window, in pixels.
pub const DEFAULT_WINDOW: usize = 31;
/// Default calibration rows as fractions of the sky height, from the top.
pub const DEFAULT_ROW_FRACTIONS: [f64; 5] = [0.1, 0.2, 0.3, 0.4, 0.5];
/// Default Gaussian smoothing of `A(x)`, in pixels.
pub const DEFAULT_PROFILE_SIGMA: f64 = 15.0;

/// Closed-form `α` for elevation factor `s`, scattering coefficient `beta` and
/// path length `path_m` (infinite for sky).
#[inline]
pub fn alpha(s: f64, beta: f64, path_m: f64) -> f64 {
    let k = 1.0 + s;
    if path_m.is_infinite() {
        1.0 / k
    } else {
        -(-beta * k * path_m).exp_m1() / k
    }
}

/// Per-channel `α` at pixel coordinates `(x, y)` measured from the principal point.
pub fn alpha_factor(
    geom: &CameraGeometry,
    atm: &Atmosphere,
    x: f64,
    y: f64,
    path_m: f64,
) -> [f64; 3] {
    let s = geom.elevation_factor(x, y);
    atm.beta().map(|b| alpha(s, b, path_m))
}

/// One calibration row: an input sky row paired with the matching calibration
/// row resampled to the input width.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRow {
    pub input_row: usize,
    pub calib_row: usize,
    pub samples: [Vec<f64>; 3],
}

/// Aligned calibration rows plus the filter settings used to compare them.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSet {
    rows: Vec<CalibrationRow>,
    window: usize,
    exposure: f64,
}

impl CalibrationSet {
    pub fn new(rows: Vec<CalibrationRow>, window: usize, exposure: f64) -> Result<Self> {
        if window < 3 || window % 2 == 0 {
            return Err(Error::param(format!(
                "filter window must be odd and at least 3, got {window}"
            )));
        }
        if !(exposure > 0.0 && exposure.is_finite()) {
            return Err(Error::param(format!(
                "exposure scale must be positive, got {exposure}"
            )));
        }
        if rows.is_empty() {
            return Err(Error::EmptyRowSet);
        }
        Ok(Self {
            rows,
            window,
            exposure,
        })
    }

    pub fn rows(&self) -> &[CalibrationRow] {
        &self.rows
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn exposure(&self) -> f64 {
        self.exposure
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignOptions {
    /// Row positions as fractions of the sky height, measured from the top.
    pub row_fractions: Vec<f64>,
    pub window: usize,
    /// Multiplies the calibration sky before differencing.
    pub exposure: f64,
}

impl Default for AlignOptions {
    fn default() -> Self {
        Self {
            row_fractions: DEFAULT_ROW_FRACTIONS.to_vec(),
            window: DEFAULT_WINDOW,
            exposure: 1.0,
        }
    }
}

/// Linear resampling of `src` to `width` samples with matching end points.
fn resample_linear(src: &[f64], width: usize) -> Vec<f64> {
    if src.len() == width {
        return src.to_vec();
    }
    if src.len() == 1 || width == 1 {
        return vec![src[0]; width];
    }
    let scale = (src.len() - 1) as f64 / (width - 1) as f64;
    (0..width)
        .map(|x| {
            let pos = x as f64 * scale;
            let i = (pos.floor() as usize).min(src.len() - 2);
            let t = pos - i as f64;
            src[i] * (1.0 - t) + src[i + 1] * t
        })
        .collect()
}

/// Pairs sky rows of `input` and `calib` at equal fractions of their sky heights.
///
/// The sky height of each image is the number of leading rows that are sky in
/// every column. Calibration rows are resampled to the input width.
pub fn align_calibration(
    input: &RadianceImage,
    input_sky: &SkyMask,
    calib: &RadianceImage,
    calib_sky: &SkyMask,
    opts: &AlignOptions,
) -> Result<CalibrationSet> {
    input_sky.ensure_dims(input.dims())?;
    calib_sky.ensure_dims(calib.dims())?;
    let sky_in = input_sky.clear_rows();
    let sky_cal = calib_sky.clear_rows();
    if sky_in == 0 {
        return Err(Error::EmptySky("input image"));
    }
    if sky_cal == 0 {
        return Err(Error::EmptySky("calibration image"));
    }
    if opts.row_fractions.is_empty() {
        return Err(Error::EmptyRowSet);
    }
    let mut rows: Vec<CalibrationRow> = Vec::new();
    for &f in &opts.row_fractions {
        if !(0.0..1.0).contains(&f) {
            return Err(Error::param(format!(
                "calibration row fraction must lie in [0, 1), got {f}"
            )));
        }
        let input_row = ((f * sky_in as f64).floor() as usize).min(sky_in - 1);
        let calib_row = ((f * sky_cal as f64).floor() as usize).min(sky_cal - 1);
        if rows.iter().any(|r| r.input_row == input_row) {
            continue;
        }
        let samples =
            std::array::from_fn(|c| resample_linear(calib.row(c, calib_row), input.width()));
        rows.push(CalibrationRow {
            input_row,
            calib_row,
            samples,
        });
    }
    CalibrationSet::new(rows, opts.window, opts.exposure)
}

/// Filtered sky differences `Q(Î row) - exposure·Q(I* row)` for every calibration row,
/// where `Q` is the quasi-quartile filter.
pub fn filtered_differences(
    polluted: &RadianceImage,
    cal: &CalibrationSet,
) -> Result<Vec<[Vec<f64>; 3]>> {
    let (w, h) = polluted.dims();
    cal.rows
        .iter()
        .map(|row| {
            if row.input_row >= h {
                return Err(Error::param(format!(
                    "calibration row {} is outside the image height {h}",
                    row.input_row
                )));
            }
            if row.samples.iter().any(|s| s.len() != w) {
                return Err(Error::DimensionMismatch {
                    what: "calibration row",
                    expected: (w, 1),
                    actual: (row.samples[0].len(), 1),
                });
            }
            let mut out: [Vec<f64>; 3] = Default::default();
            for (c, slot) in out.iter_mut().enumerate() {
                let observed = quasi_quartile(polluted.row(c, row.input_row), cal.window)?;
                let pristine = quasi_quartile(&row.samples[c], cal.window)?;
                *slot = observed
                    .iter()
                    .zip(&pristine)
                    .map(|(o, p)| o - cal.exposure * p)
                    .collect();
            }
            Ok(out)
        })
        .collect()
}

/// Least-squares fit of one constant to per-row ratios `diff / α`.
///
/// The minimizer of `Σ (z - rⱼ)²` is the mean of the `rⱼ`; ratios below zero are
/// floored first since ground light cannot be negative.
pub fn fit_row_ratios(diffs: &[f64], alphas: &[f64]) -> f64 {
    debug_assert_eq!(diffs.len(), alphas.len());
    let sum: f64 = diffs
        .iter()
        .zip(alphas)
        .map(|(d, a)| (d / a).max(0.0))
        .sum();
    sum / diffs.len() as f64
}

/// Estimates `A(x)` with the default smoothing.
pub fn estimate_light_profile(
    polluted: &RadianceImage,
    cal: &CalibrationSet,
    geom: &CameraGeometry,
    atm: &Atmosphere,
) -> Result<GroundLightProfile> {
    estimate_light_profile_with(polluted, cal, geom, atm, Some(DEFAULT_PROFILE_SIGMA))
}

/// Estimates `A(x)`; `smoothing` is the Gaussian σ along `x`, or `None` for raw
/// per-column estimates.
pub fn estimate_light_profile_with(
    polluted: &RadianceImage,
    cal: &CalibrationSet,
    geom: &CameraGeometry,
    atm: &Atmosphere,
    smoothing: Option<f64>,
) -> Result<GroundLightProfile> {
    check_geometry(polluted, geom)?;
    let diffs = filtered_differences(polluted, cal)?;
    let w = polluted.width();
    let beta = atm.beta();
    let mut values: [Vec<f64>; 3] = Default::default();
    for c in 0..3 {
        let raw: Vec<f64> = (0..w)
            .map(|x| {
                let (d, a): (Vec<f64>, Vec<f64>) = cal
                    .rows
                    .iter()
                    .zip(&diffs)
                    .map(|(row, diff)| {
                        let s = geom.elevation_at(x, row.input_row);
                        (diff[c][x], alpha(s, beta[c], DepthMap::INFINITE))
                    })
                    .unzip();
                fit_row_ratios(&d, &a)
            })
            .collect();
        values[c] = match smoothing {
            Some(sigma) => gaussian_smooth(&raw, sigma)?
                .into_iter()
                .map(|v| v.max(0.0))
                .collect(),
            None => raw,
        };
    }
    GroundLightProfile::new(values)
}

/// The veil `J(x, y) = A(x)·α(x, y)`.
pub fn pollution_image_adaptive(
    profile: &GroundLightProfile,
    geom: &CameraGeometry,
    atm: &Atmosphere,
    depth: &DepthMap,
) -> Result<RadianceImage> {
    let (w, h) = (geom.width(), geom.height());
    profile.ensure_width(w)?;
    depth.ensure_dims((w, h))?;
    let beta = atm.beta();
    let mut data = vec![0.0; 3 * w * h];
    for (c, plane) in data.chunks_mut(w * h).enumerate() {
        plane.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            for (x, v) in row.iter_mut().enumerate() {
                let s = geom.elevation_at(x, y);
                *v = profile.at(c, x) * alpha(s, beta[c], depth.get(x, y));
            }
        });
    }
    Ok(RadianceImage::from_valid(w, h, data))
}

/// Adaptive restoration together with the profile it used.
#[derive(Debug, Clone)]
pub struct AdaptiveRestoration {
    pub restoration: Restoration,
    pub profile: GroundLightProfile,
}

/// Estimate `A(x)`, synthesize `J`, subtract.
pub fn restore_adaptive(
    polluted: &RadianceImage,
    cal: &CalibrationSet,
    geom: &CameraGeometry,
    atm: &Atmosphere,
    depth: &DepthMap,
) -> Result<AdaptiveRestoration> {
    let profile = estimate_light_profile(polluted, cal, geom, atm)?;
    restore_with_profile(polluted, profile, geom, atm, depth)
}

/// Restoration with a known profile, skipping estimation.
pub fn restore_with_profile(
    polluted: &RadianceImage,
    profile: GroundLightProfile,
    geom: &CameraGeometry,
    atm: &Atmosphere,
    depth: &DepthMap,
) -> Result<AdaptiveRestoration> {
    check_geometry(polluted, geom)?;
    let veil = pollution_image_adaptive(&profile, geom, atm, depth)?;
    Ok(AdaptiveRestoration {
        restoration: subtract_veil(polluted, veil)?,
        profile,
    })
}
