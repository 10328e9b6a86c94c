//! Edge-guided filtering of depth maps.
//!
//! Window statistics are taken over finite depth samples only, so sky pixels
//! (infinite path length) never leak into the depth of nearby buildings. Sky
//! pixels themselves stay infinite.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::model::DepthMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedFilterParams {
    /// Half-size of the square box window, in pixels.
    pub radius: usize,
    /// Regularizer on guide variance, in squared guide units.
    pub epsilon: f64,
    /// Meters per raw depth-map unit.
    pub depth_scale: f64,
}

impl GuidedFilterParams {
    pub const DEFAULT_RADIUS: usize = 16;
    pub const DEFAULT_EPSILON: f64 = 1e-3;

    pub fn new(radius: usize, epsilon: f64, depth_scale: f64) -> Result<Self> {
        if radius < 1 {
            return Err(Error::param("guided filter radius must be at least 1"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::param(format!(
                "guided filter epsilon must be positive, got {epsilon}"
            )));
        }
        if !(depth_scale > 0.0 && depth_scale.is_finite()) {
            return Err(Error::param(format!(
                "depth scale must be positive, got {depth_scale}"
            )));
        }
        Ok(Self {
            radius,
            epsilon,
            depth_scale,
        })
    }
}

impl Default for GuidedFilterParams {
    fn default() -> Self {
        Self {
            radius: Self::DEFAULT_RADIUS,
            epsilon: Self::DEFAULT_EPSILON,
            depth_scale: 1.0,
        }
    }
}

/// Sums over the `(2r+1)²` box around every pixel, truncated at the borders.
fn box_sum(data: &[f64], width: usize, height: usize, r: usize) -> Vec<f64> {
    let mut horiz = vec![0.0; data.len()];
    horiz
        .par_chunks_mut(width)
        .zip(data.par_chunks(width))
        .for_each(|(out, row)| {
            let mut prefix = Vec::with_capacity(width + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for &v in row {
                acc += v;
                prefix.push(acc);
            }
            for (x, o) in out.iter_mut().enumerate() {
                let lo = x.saturating_sub(r);
                let hi = (x + r + 1).min(width);
                *o = prefix[hi] - prefix[lo];
            }
        });
    let mut out = vec![0.0; data.len()];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        let lo = y.saturating_sub(r);
        let hi = (y + r + 1).min(height);
        for yy in lo..hi {
            for (o, v) in row.iter_mut().zip(&horiz[yy * width..(yy + 1) * width]) {
                *o += v;
            }
        }
    });
    out
}

/// Guided filter of `target` by `guide` over the samples where `valid` holds.
///
/// Invalid samples are excluded from every window statistic and come back
/// unchanged. Windows without any valid sample contribute nothing.
pub fn guided_filter_plane(
    guide: &[f64],
    target: &[f64],
    valid: &[bool],
    width: usize,
    height: usize,
    radius: usize,
    epsilon: f64,
) -> Vec<f64> {
    let n = width * height;
    assert!(guide.len() == n && target.len() == n && valid.len() == n);
    let masked = |f: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..n).map(|i| if valid[i] { f(i) } else { 0.0 }).collect()
    };
    let count = box_sum(&masked(&|_| 1.0), width, height, radius);
    let sum_g = box_sum(&masked(&|i| guide[i]), width, height, radius);
    let sum_t = box_sum(&masked(&|i| target[i]), width, height, radius);
    let sum_gg = box_sum(&masked(&|i| guide[i] * guide[i]), width, height, radius);
    let sum_gt = box_sum(&masked(&|i| guide[i] * target[i]), width, height, radius);

    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n];
    let mut has = vec![0.0; n];
    for k in 0..n {
        let c = count[k];
        if c == 0.0 {
            continue;
        }
        let mg = sum_g[k] / c;
        let mt = sum_t[k] / c;
        let var = (sum_gg[k] / c - mg * mg).max(0.0);
        let cov = sum_gt[k] / c - mg * mt;
        a[k] = cov / (var + epsilon);
        b[k] = mt - a[k] * mg;
        has[k] = 1.0;
    }
    let windows = box_sum(&has, width, height, radius);
    let mean_a = box_sum(&a, width, height, radius);
    let mean_b = box_sum(&b, width, height, radius);
    (0..n)
        .map(|i| {
            if valid[i] {
                (mean_a[i] * guide[i] + mean_b[i]) / windows[i]
            } else {
                target[i]
            }
        })
        .collect()
}

/// Filters a depth map using the luminance of `guide`.
///
/// Depths are centered on their finite mean before filtering and the result
/// is clamped to the finite input range, so filtered depth stays positive.
pub fn guided_filter(
    guide: &RadianceImage,
    target: &DepthMap,
    p: &GuidedFilterParams,
) -> Result<DepthMap> {
    let (w, h) = guide.dims();
    target.ensure_dims((w, h))?;
    let valid = target.valid_mask();
    let finite: Vec<f64> = target
        .as_slice()
        .iter()
        .copied()
        .filter(|l| l.is_finite())
        .collect();
    if finite.is_empty() {
        return Ok(target.clone());
    }
    let center = finite.iter().sum::<f64>() / finite.len() as f64;
    let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let centered: Vec<f64> = target
        .as_slice()
        .iter()
        .map(|&l| if l.is_finite() { l - center } else { 0.0 })
        .collect();
    let luma = guide.luminance();
    let filtered = guided_filter_plane(&luma, &centered, &valid, w, h, p.radius, p.epsilon);
    let meters = filtered
        .into_iter()
        .zip(&valid)
        .map(|(v, &ok)| {
            if ok {
                (v + center).clamp(lo, hi)
            } else {
                DepthMap::INFINITE
            }
        })
        .collect();
    Ok(DepthMap::from_valid(w, h, meters))
}
