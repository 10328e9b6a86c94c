//! Forward synthesis of light-polluted images from known ground truth.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::adaptive::pollution_image_adaptive;
use crate::baseline::{pollution_image_baseline, BaselineParams};
use crate::error::{Error, Result};
use crate::image::RadianceImage;
use crate::model::{Atmosphere, CameraGeometry, DepthMap};
use crate::profile::GroundLightProfile;
use crate::skyline::SkyMask;

/// Circular Gaussian star, added equally to all channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Star {
    pub x: f64,
    pub y: f64,
    pub amplitude: f64,
    pub sigma: f64,
}

impl Star {
    /// Adds this star's PSF to `img`, truncated at four sigma.
    pub fn composite(&self, img: &mut RadianceImage) {
        let (w, h) = img.dims();
        let reach = (4.0 * self.sigma).ceil();
        let x0 = (self.x - reach).floor().max(0.0) as usize;
        let y0 = (self.y - reach).floor().max(0.0) as usize;
        let x1 = ((self.x + reach).ceil() as usize).min(w.saturating_sub(1));
        let y1 = ((self.y + reach).ceil() as usize).min(h.saturating_sub(1));
        let inv = 1.0 / (2.0 * self.sigma * self.sigma);
        let data = img.data_mut();
        for y in y0..=y1 {
            for x in x0..=x1 {
                let (dx, dy) = (x as f64 - self.x, y as f64 - self.y);
                let v = self.amplitude * (-(dx * dx + dy * dy) * inv).exp();
                for c in 0..3 {
                    data[c * w * h + y * w + x] += v;
                }
            }
        }
    }
}

/// Ground light description for a scene.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneLights {
    Constant([f64; 3]),
    Profile(GroundLightProfile),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimMode {
    Baseline,
    Adaptive,
}

/// Everything needed to render `Î = I + J`.
#[derive(Debug, Clone)]
pub struct SimScene {
    pub base: RadianceImage,
    pub lights: SceneLights,
    pub atm: Atmosphere,
    pub geom: CameraGeometry,
    pub depth: DepthMap,
    pub stars: Vec<Star>,
    /// Baseline-mode altitude scaling.
    pub meters_per_unit: f64,
    /// Standard deviation of additive Gaussian noise on linear radiance.
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl SimScene {
    /// Scene with no stars, no noise and unit altitude scaling.
    pub fn new(
        base: RadianceImage,
        lights: SceneLights,
        atm: Atmosphere,
        geom: CameraGeometry,
        depth: DepthMap,
    ) -> Self {
        Self {
            base,
            lights,
            atm,
            geom,
            depth,
            stars: Vec::new(),
            meters_per_unit: 1.0,
            noise_sigma: 0.0,
            noise_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dims = self.base.dims();
        if (self.geom.width(), self.geom.height()) != dims {
            return Err(Error::DimensionMismatch {
                what: "camera geometry",
                expected: dims,
                actual: (self.geom.width(), self.geom.height()),
            });
        }
        self.depth.ensure_dims(dims)?;
        match &self.lights {
            SceneLights::Constant(a) => {
                if a.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                    return Err(Error::param("ground radiance must be finite and non-negative"));
                }
            }
            SceneLights::Profile(p) => p.ensure_width(dims.0)?,
        }
        if let Some(s) = self
            .stars
            .iter()
            .find(|s| !(s.amplitude >= 0.0 && s.sigma > 0.0))
        {
            return Err(Error::param(format!(
                "star amplitude must be non-negative and sigma positive, got {s:?}"
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::param("noise sigma must be non-negative"));
        }
        Ok(())
    }

    /// The pristine image: base plus stars.
    pub fn truth(&self) -> RadianceImage {
        let mut img = self.base.clone();
        for s in &self.stars {
            s.composite(&mut img);
        }
        img
    }

    /// The veil `J` under the selected model.
    pub fn veil(&self, mode: SimMode) -> Result<RadianceImage> {
        match (mode, &self.lights) {
            (SimMode::Adaptive, SceneLights::Profile(p)) => {
                pollution_image_adaptive(p, &self.geom, &self.atm, &self.depth)
            }
            (SimMode::Adaptive, SceneLights::Constant(a)) => {
                let p = GroundLightProfile::constant(self.geom.width(), *a)?;
                pollution_image_adaptive(&p, &self.geom, &self.atm, &self.depth)
            }
            (SimMode::Baseline, SceneLights::Constant(a)) => {
                let p = BaselineParams::new(*a, self.atm, self.geom, self.meters_per_unit)?;
                pollution_image_baseline(&p, &self.depth)
            }
            (SimMode::Baseline, SceneLights::Profile(_)) => Err(Error::param(
                "baseline mode needs a uniform ground radiance, not a profile",
            )),
        }
    }
}

/// Renders `Î = I + J` (plus optional noise, clamped at zero).
pub fn synthesize(scene: &SimScene, mode: SimMode) -> Result<RadianceImage> {
    scene.validate()?;
    let truth = scene.truth();
    let veil = scene.veil(mode)?;
    let (w, h) = truth.dims();
    let mut data: Vec<f64> = truth
        .data()
        .iter()
        .zip(veil.data())
        .map(|(i, j)| i + j)
        .collect();
    if scene.noise_sigma > 0.0 {
        let normal = Normal::new(0.0, scene.noise_sigma)
            .map_err(|e| Error::param(format!("noise: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(scene.noise_seed);
        for v in &mut data {
            *v = (*v + normal.sample(&mut rng)).max(0.0);
        }
    }
    RadianceImage::new(w, h, data)
}

/// Minimum spacing between generated stars, in pixels.
pub const STAR_MIN_SEPARATION: f64 = 6.0;
const STAR_MARGIN: usize = 4;

/// Seeded star list with integer centres.
///
/// Amplitudes are drawn from `[0.1, 0.6)` and PSF sigmas from `[0.7, 1.2)`.
/// Centres keep a 4 px margin and, when space allows, a minimum spacing.
pub fn synthetic_star_field(width: usize, height: usize, count: usize, seed: u64) -> Vec<Star> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo_x, hi_x) = (STAR_MARGIN, width.saturating_sub(STAR_MARGIN).max(STAR_MARGIN + 1));
    let (lo_y, hi_y) = (STAR_MARGIN, height.saturating_sub(STAR_MARGIN).max(STAR_MARGIN + 1));
    let mut stars: Vec<Star> = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while stars.len() < count {
        let x = rng.random_range(lo_x..hi_x) as f64;
        let y = rng.random_range(lo_y..hi_y) as f64;
        let amplitude = rng.random_range(0.1..0.6);
        let sigma = rng.random_range(0.7..1.2);
        attempts += 1;
        let spaced = stars
            .iter()
            .all(|s| (s.x - x).hypot(s.y - y) >= STAR_MIN_SEPARATION);
        let crowded = attempts > 1000 * count.max(1);
        let stuck = attempts > 2000 * count.max(1);
        if spaced || stuck || (crowded && !stars.iter().any(|s| s.x == x && s.y == y)) {
            stars.push(Star {
                x,
                y,
                amplitude,
                sigma,
            });
        }
    }
    stars
}

/// Vertical linear gradient from `top` (row 0) to `bottom` (last row).
pub fn vertical_gradient(
    width: usize,
    height: usize,
    top: [f64; 3],
    bottom: [f64; 3],
) -> Result<RadianceImage> {
    let denom = height.saturating_sub(1).max(1) as f64;
    RadianceImage::from_fn(width, height, |c, _, y| {
        top[c] + (bottom[c] - top[c]) * y as f64 / denom
    })
}

/// Vertical gradient sky with `stars` seeded Gaussian stars.
pub fn make_synthetic_sky(
    width: usize,
    height: usize,
    top: [f64; 3],
    bottom: [f64; 3],
    stars: usize,
    seed: u64,
) -> Result<RadianceImage> {
    if width < 16 || height < 16 {
        return Err(Error::param(format!(
            "synthetic sky needs at least 16x16 pixels, got {width}x{height}"
        )));
    }
    let mut img = vertical_gradient(width, height, top, bottom)?;
    for s in synthetic_star_field(width, height, stars, seed) {
        s.composite(&mut img);
    }
    Ok(img)
}

/// Scene description read from a `key = value` file.
///
/// Recognized keys (all optional unless noted):
///
/// | key | value |
/// |-----|-------|
/// | `width`, `height` | pixels (required) |
/// | `focal` | focal length in pixels; default: width |
/// | `beta` | one or three comma-separated coefficients, m⁻¹ |
/// | `mode` | `adaptive` or `baseline` |
/// | `sky_top`, `sky_bottom` | `r,g,b` gradient end points |
/// | `stars`, `seed` | star count and RNG seed |
/// | `lights` | `r,g,b` uniform ground radiance |
/// | `lights_left`, `lights_right` | `r,g,b` ends of a linear ramp in `x` |
/// | `lights_csv` | path to an `x,A_R,A_G,A_B` profile |
/// | `skyline` | first ground row; default: no ground |
/// | `ground` | `r,g,b` radiance below the skyline |
/// | `ground_depth` | meters; default 1000 |
/// | `meters_per_unit` | baseline altitude scaling |
/// | `noise_sigma`, `noise_seed` | additive Gaussian noise |
///
/// `#` starts a comment; blank lines are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    entries: BTreeMap<String, String>,
    base_dir: PathBuf,
}

const KNOWN_KEYS: &[&str] = &[
    "width",
    "height",
    "focal",
    "beta",
    "mode",
    "sky_top",
    "sky_bottom",
    "stars",
    "seed",
    "lights",
    "lights_left",
    "lights_right",
    "lights_csv",
    "skyline",
    "ground",
    "ground_depth",
    "meters_per_unit",
    "noise_sigma",
    "noise_seed",
];

/// A scene ready to render, with its sky mask and forward model.
#[derive(Debug, Clone)]
pub struct BuiltScene {
    pub scene: SimScene,
    pub mode: SimMode,
    pub sky: SkyMask,
}

impl SimConfig {
    /// Parses config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::param(format!("config line {}: expected `key = value`", n + 1))
            })?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::param(format!("config line {}: unknown key `{k}`", n + 1)));
            }
            if entries.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::param(format!("config line {}: duplicate key `{k}`", n + 1)));
            }
        }
        Ok(Self {
            entries,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::param(format!("config key `{key}`: cannot parse `{v}`")))
            })
            .transpose()
    }

    fn triple(&self, key: &str) -> Result<Option<[f64; 3]>> {
        self.get(key)
            .map(|v| {
                parse_channels(v)
                    .map_err(|e| Error::param(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn build(&self) -> Result<BuiltScene> {
        let width: usize = self
            .number("width")?
            .ok_or_else(|| Error::param("config needs `width`"))?;
        let height: usize = self
            .number("height")?
            .ok_or_else(|| Error::param("config needs `height`"))?;
        let geom = match self.number::<f64>("focal")? {
            Some(f) => CameraGeometry::new(width, height, f)?,
            None => CameraGeometry::with_default_focal(width, height)?,
        };
        let atm = match self.triple("beta")? {
            Some(b) => Atmosphere::with_beta(b)?,
            None => Atmosphere::default(),
        };
        let mode = match self.get("mode").unwrap_or("adaptive") {
            "adaptive" => SimMode::Adaptive,
            "baseline" => SimMode::Baseline,
            other => return Err(Error::param(format!("config key `mode`: unknown mode `{other}`"))),
        };
        let top = self.triple("sky_top")?.unwrap_or([0.02, 0.02, 0.03]);
        let bottom = self.triple("sky_bottom")?.unwrap_or([0.04, 0.04, 0.05]);
        let skyline: usize = self.number("skyline")?.unwrap_or(height);
        let sky = SkyMask::flat(width, height, skyline)?;
        let ground = self.triple("ground")?.unwrap_or([0.01, 0.01, 0.01]);
        let ground_depth: f64 = self.number("ground_depth")?.unwrap_or(1000.0);
        let gradient = vertical_gradient(width, height, top, bottom)?;
        let base = RadianceImage::from_fn(width, height, |c, x, y| {
            if sky.is_sky(x, y) {
                gradient.get(c, x, y)
            } else {
                ground[c]
            }
        })?;
        let depth = DepthMap::from_fn(width, height, |x, y| {
            if sky.is_sky(x, y) {
                DepthMap::INFINITE
            } else {
                ground_depth
            }
        })?;
        let lights = self.lights(width)?;
        let star_count: usize = self.number("stars")?.unwrap_or(0);
        let seed: u64 = self.number("seed")?.unwrap_or(0);
        let stars = synthetic_star_field(width, height, star_count, seed)
            .into_iter()
            .filter(|s| sky.is_sky(s.x as usize, s.y as usize))
            .collect();
        let scene = SimScene {
            base,
            lights,
            atm,
            geom,
            depth,
            stars,
            meters_per_unit: self.number("meters_per_unit")?.unwrap_or(1.0),
            noise_sigma: self.number("noise_sigma")?.unwrap_or(0.0),
            noise_seed: self.number("noise_seed")?.unwrap_or(0),
        };
        scene.validate()?;
        Ok(BuiltScene { scene, mode, sky })
    }

    fn lights(&self, width: usize) -> Result<SceneLights> {
        let given = ["lights", "lights_left", "lights_csv"]
            .iter()
            .filter(|k| self.get(k).is_some())
            .count();
        if given > 1 {
            return Err(Error::param(
                "config may set only one of `lights`, `lights_left`/`lights_right`, `lights_csv`",
            ));
        }
        if let Some(a) = self.triple("lights")? {
            return Ok(SceneLights::Constant(a));
        }
        if let Some(path) = self.get("lights_csv") {
            let path = self.base_dir.join(path);
            let file = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
            return Ok(SceneLights::Profile(GroundLightProfile::read_csv(file)?));
        }
        match (self.triple("lights_left")?, self.triple("lights_right")?) {
            (Some(l), Some(r)) => Ok(SceneLights::Profile(ramp_profile(width, l, r)?)),
            (None, None) => Ok(SceneLights::Constant([0.0; 3])),
            _ => Err(Error::param("`lights_left` and `lights_right` must be given together")),
        }
    }
}

/// Linear ramp profile from `left` at column 0 to `right` at the last column.
pub fn ramp_profile(width: usize, left: [f64; 3], right: [f64; 3]) -> Result<GroundLightProfile> {
    let denom = width.saturating_sub(1).max(1) as f64;
    GroundLightProfile::new(std::array::from_fn(|c| {
        (0..width)
            .map(|x| left[c] + (right[c] - left[c]) * x as f64 / denom)
            .collect()
    }))
}

/// Parses `v` or `r,g,b`.
pub fn parse_channels(text: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>().map_err(|_| format!("`{p}` is not a number")))
        .collect::<std::result::Result<_, _>>()?;
    match nums.as_slice() {
        [v] => Ok([*v; 3]),
        [r, g, b] => Ok([*r, *g, *b]),
        _ => Err(format!("expected 1 or 3 values, got {}", nums.len())),
    }
}
