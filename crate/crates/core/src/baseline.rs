//! Uniform-ground-radiance model.
//!
//! Every pixel integrates the altitude irradiance along its viewing ray:
//!
//! ```text
//! J(x, y) = ∫₀^L E(τ·s(x, y)) · β e^{-βτ} dτ,     E(h) = 2πA·E1(β·max(h, 1 m))
//! ```
//!
//! with `L` the scene depth, or `tau_max_factor / β` for sky pixels.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::adaptive::{self, CalibrationSet};
use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::model::{Atmosphere, CameraGeometry, DepthMap, Y_FLOOR_M};
use crate::quadrature;
use crate::restore::{subtract_veil, Restoration};
use crate::scattering::e1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineParams {
    /// Ground radiance `A` per channel.
    pub a_const: [f64; 3],
    pub atm: Atmosphere,
    pub geom: CameraGeometry,
    /// Meters of world altitude per unit of `τ·s`.
    pub meters_per_unit: f64,
}

impl BaselineParams {
    pub fn new(
        a_const: [f64; 3],
        atm: Atmosphere,
        geom: CameraGeometry,
        meters_per_unit: f64,
    ) -> Result<Self> {
        if let Some(bad) = a_const.iter().find(|a| !(**a >= 0.0) || !a.is_finite()) {
            return Err(Error::param(format!(
                "ground radiance must be finite and non-negative, got {bad}"
            )));
        }
        if !(meters_per_unit > 0.0 && meters_per_unit.is_finite()) {
            return Err(Error::param(format!(
                "meters per unit must be positive, got {meters_per_unit}"
            )));
        }
        Ok(Self {
            a_const,
            atm,
            geom,
            meters_per_unit,
        })
    }
}

/// Altitude reached after travelling `tau` meters along the ray through `(x, y)`.
pub fn altitude_along_ray(geom: &CameraGeometry, x: f64, y: f64, tau: f64) -> f64 {
    tau * geom.elevation_factor(x, y)
}

/// Veil per unit ground radiance for one ray.
///
/// `s` is the ray's elevation factor and `path_m` the scene depth (infinite for
/// sky). In the optical-depth variable `t = βτ` the integral reads
/// `∫₀^T 2π·E1(β·max(t·s·m/β, 1)) e^{-t} dt`; the stretch below the altitude
/// floor has a constant integrand and is integrated exactly.
pub fn unit_veil(s: f64, path_m: f64, beta: f64, atm: &Atmosphere, meters_per_unit: f64) -> f64 {
    let optical_len = (beta * path_m).min(atm.tau_max_factor());
    if !(optical_len > 0.0) {
        return 0.0;
    }
    let floor_irr = 2.0 * PI * e1(beta * Y_FLOOR_M);
    // altitude per unit optical depth
    let climb = s * meters_per_unit / beta;
    let knee = if climb > 0.0 {
        Y_FLOOR_M / climb
    } else {
        f64::INFINITY
    };
    if knee >= optical_len {
        return floor_irr * -(-optical_len).exp_m1();
    }
    let flat = floor_irr * -(-knee).exp_m1();
    let k = s * meters_per_unit;
    let integrand = |t: f64| 2.0 * PI * e1(k * t) * (-t).exp();
    let tail = |b: f64| 2.0 * PI * e1(k * b) * (-b).exp();
    let sloped = quadrature::integrate_doubling(
        &integrand,
        knee,
        optical_len,
        knee,
        atm.quad_rel_tol(),
        tail,
    );
    flat + sloped
}

/// Per-pixel unit veil for every distinct β, keyed by channel.
fn unit_veil_planes(
    geom: &CameraGeometry,
    atm: &Atmosphere,
    depth: &DepthMap,
    meters_per_unit: f64,
    needed: [bool; 3],
) -> [Option<Vec<f64>>; 3] {
    let (w, h) = (geom.width(), geom.height());
    let beta = atm.beta();
    let mut planes: [Option<Vec<f64>>; 3] = [None, None, None];
    for c in 0..3 {
        if !needed[c] {
            continue;
        }
        if let Some(prev) = (0..c).find(|&p| needed[p] && beta[p] == beta[c]) {
            planes[c] = planes[prev].clone();
            continue;
        }
        let plane: Vec<f64> = (0..w * h)
            .into_par_iter()
            .map(|i| {
                let (col, row) = (i % w, i / w);
                let s = geom.elevation_at(col, row);
                unit_veil(s, depth.get(col, row), beta[c], atm, meters_per_unit)
            })
            .collect();
        planes[c] = Some(plane);
    }
    planes
}

/// The veil `J` for uniform ground radiance.
pub fn pollution_image_baseline(p: &BaselineParams, depth: &DepthMap) -> Result<RadianceImage> {
    let (w, h) = (p.geom.width(), p.geom.height());
    depth.ensure_dims((w, h))?;
    let needed = p.a_const.map(|a| a > 0.0);
    let planes = unit_veil_planes(&p.geom, &p.atm, depth, p.meters_per_unit, needed);
    let mut data = Vec::with_capacity(3 * w * h);
    for c in 0..3 {
        match &planes[c] {
            Some(unit) => data.extend(unit.iter().map(|u| p.a_const[c] * u)),
            None => data.extend(std::iter::repeat_n(0.0, w * h)),
        }
    }
    Ok(RadianceImage::from_valid(w, h, data))
}

/// `I = max(Î - J, 0)` with the uniform-radiance veil.
pub fn restore_baseline(
    polluted: &RadianceImage,
    p: &BaselineParams,
    depth: &DepthMap,
) -> Result<Restoration> {
    check_geometry(polluted, &p.geom)?;
    let veil = pollution_image_baseline(p, depth)?;
    subtract_veil(polluted, veil)
}

pub(crate) fn check_geometry(img: &RadianceImage, geom: &CameraGeometry) -> Result<()> {
    let dims = (geom.width(), geom.height());
    if img.dims() != dims {
        return Err(Error::DimensionMismatch {
            what: "image vs camera geometry",
            expected: dims,
            actual: img.dims(),
        });
    }
    Ok(())
}

/// Least-squares uniform radiance matching the calibration rows.
///
/// The mean over every calibration pixel of the filtered sky difference divided
/// by the unit veil at that pixel, with negative ratios floored at zero.
pub fn fit_constant_radiance(
    polluted: &RadianceImage,
    cal: &CalibrationSet,
    atm: &Atmosphere,
    geom: &CameraGeometry,
    meters_per_unit: f64,
) -> Result<[f64; 3]> {
    check_geometry(polluted, geom)?;
    let diffs = adaptive::filtered_differences(polluted, cal)?;
    let beta = atm.beta();
    let mut out = [0.0; 3];
    for c in 0..3 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (row, diff) in cal.rows().iter().zip(&diffs) {
            let y = row.input_row;
            let units: Vec<f64> = (0..geom.width())
                .into_par_iter()
                .map(|x| {
                    unit_veil(
                        geom.elevation_at(x, y),
                        DepthMap::INFINITE,
                        beta[c],
                        atm,
                        meters_per_unit,
                    )
                })
                .collect();
            for (d, u) in diff[c].iter().zip(units) {
                sum += (d / u).max(0.0);
                count += 1;
            }
        }
        out[c] = sum / count as f64;
    }
    Ok(out)
}
