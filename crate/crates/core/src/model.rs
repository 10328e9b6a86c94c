//! Camera, atmosphere and depth descriptions shared by the forward and inverse models.

use crate::error::{Error, Result};

/// Lowest altitude, in meters, at which the altitude irradiance is evaluated.
///
/// `E(y)` diverges logarithmically at the ground; every caller clamps to this floor.
pub const Y_FLOOR_M: f64 = 1.0;

/// Pinhole camera with the principal point at the image center.
///
/// Pixel coordinates are measured from the principal point with `x` to the
/// right and `y` upward. Column `c` maps to `x = c + 0.5 - width/2` and row `r`
/// (counted from the top) maps to `y = height/2 - r - 1`, so the bottom row sits
/// at `y = -h` and looks along the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraGeometry {
    width: usize,
    height: usize,
    focal_px: f64,
}

impl CameraGeometry {
    pub fn new(width: usize, height: usize, focal_px: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param("camera frame must be at least 1x1"));
        }
        if !(focal_px.is_finite() && focal_px > 0.0) {
            return Err(Error::param(format!(
                "focal length must be positive, got {focal_px}"
            )));
        }
        // keeps the elevation factor below sqrt(2) on every in-frame pixel
        if focal_px < height as f64 / 2.0 {
            return Err(Error::param(format!(
                "focal length {focal_px} px is shorter than half the image height ({}); \
                 vertical field of view above 90 degrees is not supported",
                height as f64 / 2.0
            )));
        }
        Ok(Self {
            width,
            height,
            focal_px,
        })
    }

    /// Focal length defaulting to the image width (about 53° horizontal field of view).
    pub fn with_default_focal(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, width as f64)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn focal_px(&self) -> f64 {
        self.focal_px
    }

    /// Half the image height, `h`.
    pub fn half_height_px(&self) -> f64 {
        self.height as f64 / 2.0
    }

    /// Centered coordinates `(x, y)` of pixel `(col, row)`.
    #[inline]
    pub fn pixel_coords(&self, col: usize, row: usize) -> (f64, f64) {
        let x = col as f64 + 0.5 - self.width as f64 / 2.0;
        let y = self.half_height_px() - row as f64 - 1.0;
        (x, y)
    }

    /// Ratio between altitude gained and distance travelled along the ray
    /// through `(x, y)`: `(y + h) / sqrt(f² + x² + y²)`.
    #[inline]
    pub fn elevation_factor(&self, x: f64, y: f64) -> f64 {
        let f = self.focal_px;
        let s = (y + self.half_height_px()) / (f * f + x * x + y * y).sqrt();
        s.max(0.0)
    }

    #[inline]
    pub fn elevation_at(&self, col: usize, row: usize) -> f64 {
        let (x, y) = self.pixel_coords(col, row);
        self.elevation_factor(x, y)
    }
}

/// Homogeneous atmosphere: per-channel scattering coefficients and quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atmosphere {
    beta: [f64; 3],
    quad_rel_tol: f64,
    tau_max_factor: f64,
}

impl Atmosphere {
    /// Aerosol-free air.
    pub const BETA_CLEAR: f64 = 2.8e-5;
    /// Slightly hazy air; the default.
    pub const BETA_SLIGHT_HAZE: f64 = 1e-4;
    /// Hazy air.
    pub const BETA_HAZE: f64 = 1e-3;

    pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-9;
    pub const DEFAULT_TAU_MAX_FACTOR: f64 = 15.0;

    pub fn new(beta: [f64; 3], quad_rel_tol: f64, tau_max_factor: f64) -> Result<Self> {
        for b in beta {
            if !(b > 0.0 && b <= 1.0) {
                return Err(Error::param(format!(
                    "scattering coefficient must lie in (0, 1] per meter, got {b}"
                )));
            }
        }
        if !(quad_rel_tol > 0.0 && quad_rel_tol <= 1e-3) {
            return Err(Error::param(format!(
                "quadrature tolerance must lie in (0, 1e-3], got {quad_rel_tol}"
            )));
        }
        if !(tau_max_factor >= 10.0 && tau_max_factor.is_finite()) {
            return Err(Error::param(format!(
                "path truncation factor must be at least 10, got {tau_max_factor}"
            )));
        }
        Ok(Self {
            beta,
            quad_rel_tol,
            tau_max_factor,
        })
    }

    pub fn with_beta(beta: [f64; 3]) -> Result<Self> {
        Self::new(
            beta,
            Self::DEFAULT_QUAD_REL_TOL,
            Self::DEFAULT_TAU_MAX_FACTOR,
        )
    }

    pub fn uniform(beta: f64) -> Result<Self> {
        Self::with_beta([beta; 3])
    }

    pub fn beta(&self) -> [f64; 3] {
        self.beta
    }

    pub fn quad_rel_tol(&self) -> f64 {
        self.quad_rel_tol
    }

    pub fn tau_max_factor(&self) -> f64 {
        self.tau_max_factor
    }

    /// Path length at which a sky ray is cut off for channel `c`.
    pub fn max_path_m(&self, c: usize) -> f64 {
        self.tau_max_factor / self.beta[c]
    }
}

impl Default for Atmosphere {
    fn default() -> Self {
        Self {
            beta: [Self::BETA_SLIGHT_HAZE; 3],
            quad_rel_tol: Self::DEFAULT_QUAD_REL_TOL,
            tau_max_factor: Self::DEFAULT_TAU_MAX_FACTOR,
        }
    }
}

/// Per-pixel path length in meters; `f64::INFINITY` marks sky pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    meters: Vec<f64>,
}

impl DepthMap {
    /// The distinguished value for pixels whose ray never meets the scene.
    pub const INFINITE: f64 = f64::INFINITY;

    pub fn new(width: usize, height: usize, meters: Vec<f64>) -> Result<Self> {
        if meters.len() != width * height {
            return Err(Error::param(format!(
                "expected {} depth samples, got {}",
                width * height,
                meters.len()
            )));
        }
        if let Some(bad) = meters.iter().find(|&&l| !(l > 0.0)) {
            return Err(Error::domain(format!(
                "path lengths must be positive or infinite, found {bad}"
            )));
        }
        Ok(Self {
            width,
            height,
            meters,
        })
    }

    pub fn infinite(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            meters: vec![Self::INFINITE; width * height],
        }
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut meters = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                meters.push(f(x, y));
            }
        }
        Self::new(width, height, meters)
    }

    pub(crate) fn from_valid(width: usize, height: usize, meters: Vec<f64>) -> Self {
        Self {
            width,
            height,
            meters,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.meters[y * self.width + x]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.meters
    }

    /// True where the path length is finite.
    pub fn valid_mask(&self) -> Vec<bool> {
        self.meters.iter().map(|l| l.is_finite()).collect()
    }

    pub fn ensure_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                what: "depth map",
                expected: dims,
                actual: self.dims(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bottom_row_looks_at_horizon() {
        let g = CameraGeometry::new(640, 480, 800.0).unwrap();
        let (_, y) = g.pixel_coords(0, 479);
        assert_eq!(y, -240.0);
        for col in [0, 100, 639] {
            assert_eq!(g.elevation_at(col, 479), 0.0);
        }
    }

    #[test]
    fn columns_are_symmetric() {
        let g = CameraGeometry::new(7, 5, 10.0).unwrap();
        for row in 0..5 {
            for col in 0..7 {
                assert_eq!(g.elevation_at(col, row), g.elevation_at(6 - col, row));
            }
        }
    }

    #[test]
    fn elevation_factor_bounded() {
        assert!(CameraGeometry::new(64, 400, 199.0).is_err());
        let g = CameraGeometry::new(64, 400, 200.0).unwrap();
        for row in 0..400 {
            for col in 0..64 {
                let s = g.elevation_at(col, row);
                assert!((0.0..2f64.sqrt()).contains(&s));
            }
        }
    }

    #[test]
    fn atmosphere_validation() {
        assert!(Atmosphere::uniform(0.0).is_err());
        assert!(Atmosphere::uniform(1.5).is_err());
        assert!(Atmosphere::new([1e-4; 3], 1e-2, 15.0).is_err());
        assert!(Atmosphere::new([1e-4; 3], 1e-6, 5.0).is_err());
        let atm = Atmosphere::default();
        assert_eq!(atm.beta(), [1e-4; 3]);
        assert_eq!(atm.max_path_m(0), 150_000.0);
    }

    #[test]
    fn depth_rejects_nonpositive() {
        assert!(DepthMap::new(2, 1, vec![1.0, 0.0]).is_err());
        assert!(DepthMap::new(2, 1, vec![1.0, -3.0]).is_err());
        assert!(DepthMap::new(2, 1, vec![1.0, f64::NEG_INFINITY]).is_err());
        assert!(DepthMap::new(2, 1, vec![1.0, f64::NAN]).is_err());
        let d = DepthMap::new(2, 1, vec![1.0, DepthMap::INFINITE]).unwrap();
        assert_eq!(d.valid_mask(), vec![true, false]);
    }
}
