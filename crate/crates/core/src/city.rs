//! Restoration below the skyline with per-pixel path lengths.

use std::path::Path;

use crate::adaptive::{self, CalibrationSet};
use crate::error::{Error, Result};
use crate::guided::{guided_filter, GuidedFilterParams};
use crate::image::RadianceImage;
use crate::io::{load_scalar, ScalarRaster};
use crate::model::{Atmosphere, CameraGeometry, DepthMap};
use crate::profile::GroundLightProfile;
use crate::restore::Restoration;
use crate::skyline::SkyMask;

/// Scales a raw single-channel raster to meters and marks sky pixels infinite.
///
/// Non-finite raw values below the skyline are also taken as infinite.
pub fn depth_from_raster(raster: &ScalarRaster, scale: f64, sky: &SkyMask) -> Result<DepthMap> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param(format!("depth scale must be positive, got {scale}")));
    }
    if raster.channels != 1 {
        return Err(Error::param("depth raster must have one channel"));
    }
    let (w, h) = (raster.width, raster.height);
    sky.ensure_dims((w, h))?;
    let mut meters = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let raw = raster.data[y * w + x];
            let v = if sky.is_sky(x, y) || !raw.is_finite() {
                DepthMap::INFINITE
            } else if raw > 0.0 {
                raw * scale
            } else {
                return Err(Error::domain(format!(
                    "depth at column {x}, row {y} is {raw}; finite depths must be positive"
                )));
            };
            meters.push(v);
        }
    }
    DepthMap::new(w, h, meters)
}

/// Loads a depth map from a grayscale PFM (any unit) or PNG (raw codes).
pub fn load_depth(path: &Path, scale: f64, sky: &SkyMask) -> Result<DepthMap> {
    depth_from_raster(&load_scalar(path)?, scale, sky)
}

/// Outcome of a depth-aware restoration.
#[derive(Debug, Clone)]
pub struct CityRestoration {
    pub restoration: Restoration,
    pub profile: GroundLightProfile,
    /// The guided-filtered depth used for the veil.
    pub depth: DepthMap,
}

/// Guided-filters `depth_raw` by the input luminance, then restores with the
/// filtered path lengths.
pub fn restore_city(
    polluted: &RadianceImage,
    cal: &CalibrationSet,
    geom: &CameraGeometry,
    atm: &Atmosphere,
    depth_raw: &DepthMap,
    gf: &GuidedFilterParams,
) -> Result<CityRestoration> {
    let profile = adaptive::estimate_light_profile(polluted, cal, geom, atm)?;
    restore_city_with_profile(polluted, profile, geom, atm, depth_raw, gf)
}

/// As [`restore_city`] with a known light profile.
pub fn restore_city_with_profile(
    polluted: &RadianceImage,
    profile: GroundLightProfile,
    geom: &CameraGeometry,
    atm: &Atmosphere,
    depth_raw: &DepthMap,
    gf: &GuidedFilterParams,
) -> Result<CityRestoration> {
    depth_raw.ensure_dims(polluted.dims())?;
    let depth = guided_filter(polluted, depth_raw, gf)?;
    let out = adaptive::restore_with_profile(polluted, profile, geom, atm, &depth)?;
    Ok(CityRestoration {
        restoration: out.restoration,
        profile: out.profile,
        depth,
    })
}
