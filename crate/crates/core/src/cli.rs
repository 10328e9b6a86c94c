//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on processing errors.
//! Diagnostics go to standard error; `--json` prints a summary object on
//! standard output.

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::adaptive::{
    self, align_calibration, AlignOptions, CalibrationSet, DEFAULT_WINDOW,
};
use crate::baseline::{fit_constant_radiance, restore_baseline, BaselineParams};
use crate::city::{load_depth, restore_city_with_profile};
use crate::error::Error;
use crate::guided::GuidedFilterParams;
use crate::image::RadianceImage;
use crate::io::{load_image, save_image, write_pfm, BitDepth, ScalarRaster, Transfer};
use crate::model::{Atmosphere, CameraGeometry, DepthMap};
use crate::profile::GroundLightProfile;
use crate::restore::Restoration;
use crate::scattering::emit_irradiance_curve;
use crate::sim::{parse_channels, synthesize, SceneLights, SimConfig};
use crate::skyline::{detect_skyline, SkyMask};

/// Summary schema version printed with `--json`.
pub const SUMMARY_SCHEMA: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "skyclear",
    version,
    about = "Remove artificial light pollution from nighttime photographs",
    long_about = "Remove artificial light pollution from nighttime photographs.\n\n\
        Ground lights scattered by aerosols add a veil J to the image. The veil is \
        modeled physically, estimated from the image and a pristine calibration sky, \
        and subtracted in linear radiance.\n\n\
        Exit status: 0 success, 1 processing error, 2 usage error."
)]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism. Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Print a JSON summary on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Restore the sky with a spatially varying ground light profile A(x).
    RestoreSky(RestoreSkyArgs),
    /// Restore with a uniform ground radiance and the full path-integral model.
    RestoreBaseline(RestoreBaselineArgs),
    /// Restore sky and buildings using a depth map refined by guided filtering.
    RestoreCity(RestoreCityArgs),
    /// Estimate A(x) and write it as CSV (x,A_R,A_G,A_B).
    EstimateLights(EstimateLightsArgs),
    /// Render a polluted image from a scene config file (key = value lines).
    Simulate(SimulateArgs),
    /// Write the altitude irradiance curve E(y) as CSV.
    Curve(CurveArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransferArg {
    /// sRGB-encoded PNG samples.
    Srgb,
    /// Linear PNG samples.
    Linear,
}

impl From<TransferArg> for Transfer {
    fn from(t: TransferArg) -> Self {
        match t {
            TransferArg::Srgb => Transfer::Srgb,
            TransferArg::Linear => Transfer::Linear,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EncodingArgs {
    /// PNG transfer function for inputs and outputs (PFM is always linear).
    #[arg(long, value_enum, default_value_t = TransferArg::Srgb)]
    pub transfer: TransferArg,
    /// PNG output bit depth.
    #[arg(long, default_value_t = 16, value_parser = parse_bits)]
    pub bits: u8,
}

impl EncodingArgs {
    fn depth(&self) -> BitDepth {
        if self.bits == 8 {
            BitDepth::Eight
        } else {
            BitDepth::Sixteen
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    /// Scattering coefficient in 1/m: one value or R,G,B.
    #[arg(long, default_value = "1e-4", value_parser = parse_triple)]
    pub beta: Triple,
    /// Focal length in pixels; defaults to the image width.
    #[arg(long)]
    pub focal: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrationArgs {
    /// Pristine sky image of the same site (PNG or PFM).
    #[arg(long)]
    pub calib: Option<PathBuf>,
    /// Skyline CSV (column,skyline_row) for the input; detected when absent.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Skyline CSV for the calibration image; detected when absent.
    #[arg(long)]
    pub calib_mask: Option<PathBuf>,
    /// Quasi-quartile window in pixels (odd, at least 3).
    #[arg(long, default_value_t = DEFAULT_WINDOW, value_parser = parse_window)]
    pub window: usize,
    /// Calibration rows as comma-separated fractions of the sky height.
    #[arg(long, default_value = "0.1,0.2,0.3,0.4,0.5", value_parser = parse_rows)]
    pub rows: Rows,
    /// Multiplier applied to the calibration sky before differencing.
    #[arg(long, default_value_t = 1.0)]
    pub exposure: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VeilOutputArgs {
    /// Also write the subtracted veil J (PFM keeps values above 1).
    #[arg(long)]
    pub dump_veil: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["calib", "lights"])))]
pub struct RestoreSkyArgs {
    /// Light-polluted input image (PNG or PFM).
    pub input: PathBuf,
    /// Restored output image.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Light profile CSV; skips estimation.
    #[arg(long, conflicts_with = "calib")]
    pub lights: Option<PathBuf>,
    #[command(flatten)]
    pub cal: CalibrationArgs,
    /// Depth map for ground pixels (grayscale PFM or PNG).
    #[arg(long)]
    pub depth: Option<PathBuf>,
    /// Meters per depth-map unit.
    #[arg(long, default_value_t = 1.0)]
    pub depth_scale: f64,
    /// Path length in meters assumed below the skyline without --depth (`inf` allowed).
    #[arg(long, default_value_t = 1000.0)]
    pub ground_depth: f64,
    /// Write the estimated light profile CSV.
    #[arg(long)]
    pub lights_out: Option<PathBuf>,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[command(flatten)]
    pub veil: VeilOutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["calib", "a"])))]
pub struct RestoreBaselineArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Uniform ground radiance: one value or R,G,B. Fitted from --calib when absent.
    #[arg(long, value_parser = parse_triple, conflicts_with = "calib")]
    pub a: Option<Triple>,
    #[command(flatten)]
    pub cal: CalibrationArgs,
    /// Meters of altitude per unit of optical path times elevation factor.
    #[arg(long, default_value_t = 1.0)]
    pub meters_per_unit: f64,
    #[arg(long)]
    pub depth: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub depth_scale: f64,
    #[arg(long, default_value_t = 1000.0)]
    pub ground_depth: f64,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[command(flatten)]
    pub veil: VeilOutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["calib", "lights"])))]
pub struct RestoreCityArgs {
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, conflicts_with = "calib")]
    pub lights: Option<PathBuf>,
    #[command(flatten)]
    pub cal: CalibrationArgs,
    /// Depth map (grayscale PFM or 16-bit PNG).
    #[arg(long)]
    pub depth: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub depth_scale: f64,
    /// Guided filter box radius in pixels.
    #[arg(long, default_value_t = GuidedFilterParams::DEFAULT_RADIUS)]
    pub gf_radius: usize,
    /// Guided filter regularizer on [0, 1] luminance.
    #[arg(long, default_value_t = GuidedFilterParams::DEFAULT_EPSILON)]
    pub gf_eps: f64,
    /// Use the depth map as given, without guided filtering.
    #[arg(long)]
    pub raw_depth: bool,
    /// Write the depth actually used as a grayscale PFM.
    #[arg(long)]
    pub dump_depth: Option<PathBuf>,
    #[arg(long)]
    pub lights_out: Option<PathBuf>,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub encoding: EncodingArgs,
    #[command(flatten)]
    pub veil: VeilOutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["calib"])))]
pub struct EstimateLightsArgs {
    pub input: PathBuf,
    /// Output CSV.
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub cal: CalibrationArgs,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[arg(long, value_enum, default_value_t = TransferArg::Srgb)]
    pub transfer: TransferArg,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scene config file.
    pub config: PathBuf,
    /// Polluted output image.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the pristine image (base plus stars).
    #[arg(long)]
    pub truth_out: Option<PathBuf>,
    /// Also write the scene skyline CSV.
    #[arg(long)]
    pub mask_out: Option<PathBuf>,
    /// Also write the ground light profile CSV.
    #[arg(long)]
    pub lights_out: Option<PathBuf>,
    /// Also write the scene depth as a grayscale PFM.
    #[arg(long)]
    pub depth_out: Option<PathBuf>,
    #[command(flatten)]
    pub encoding: EncodingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[arg(long, default_value = "1e-4", value_parser = parse_triple)]
    pub beta: Triple,
    /// Ground radiance: one value or R,G,B.
    #[arg(long, default_value = "1", value_parser = parse_triple)]
    pub a: Triple,
    /// Lowest altitude in meters (at least 1).
    #[arg(long, default_value_t = 10.0)]
    pub ymin: f64,
    /// Highest altitude in meters.
    #[arg(long, default_value_t = 100_000.0)]
    pub ymax: f64,
    /// Number of log-spaced samples.
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    /// Output CSV.
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Three per-channel values parsed from `v` or `r,g,b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple(pub [f64; 3]);

#[derive(Debug, Clone, PartialEq)]
pub struct Rows(pub Vec<f64>);

fn parse_triple(s: &str) -> Result<Triple, String> {
    parse_channels(s).map(Triple)
}

fn parse_rows(s: &str) -> Result<Rows, String> {
    let rows = s
        .split(',')
        .map(|p| {
            let v: f64 = p
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not a number", p.trim()))?;
            if (0.0..1.0).contains(&v) {
                Ok(v)
            } else {
                Err(format!("row fraction {v} is outside [0, 1)"))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if rows.is_empty() {
        return Err("at least one row fraction is required".into());
    }
    Ok(Rows(rows))
}

fn parse_window(s: &str) -> Result<usize, String> {
    let w: usize = s.parse().map_err(|_| format!("`{s}` is not a whole number"))?;
    if w < 3 || w % 2 == 0 {
        return Err(format!("window must be odd and at least 3, got {w}"));
    }
    Ok(w)
}

fn parse_bits(s: &str) -> Result<u8, String> {
    match s {
        "8" => Ok(8),
        "16" => Ok(16),
        _ => Err(format!("bit depth must be 8 or 16, got `{s}`")),
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Processing(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Processing(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Debug, Serialize)]
struct ChannelStats {
    min: f64,
    mean: f64,
    max: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    schema: u32,
    command: &'static str,
    runtime_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    clamp_fraction: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    removed_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lights: Option<[ChannelStats; 3]>,
    parameters: Value,
    outputs: Vec<PathBuf>,
}

impl Summary {
    fn new(command: &'static str, parameters: Value) -> Self {
        Self {
            schema: SUMMARY_SCHEMA,
            command,
            runtime_ms: 0.0,
            clamp_fraction: None,
            removed_energy: None,
            lights: None,
            parameters,
            outputs: Vec::new(),
        }
    }

    fn restoration(&mut self, r: &Restoration, polluted: &RadianceImage) {
        self.clamp_fraction = Some(r.clamp_fraction);
        self.removed_energy = Some(r.removed_energy(polluted));
    }

    fn profile(&mut self, p: &GroundLightProfile) {
        self.lights = Some(p.stats().map(|(min, mean, max)| ChannelStats { min, mean, max }));
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        builder = builder.num_threads(n as usize);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 1;
        }
    };
    let start = Instant::now();
    match pool.install(|| execute(&cli.command)) {
        Ok(mut summary) => {
            summary.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            if cli.json {
                match serde_json::to_string(&summary) {
                    Ok(text) => println!("{text}"),
                    Err(e) => {
                        eprintln!("error: cannot encode summary: {e}");
                        return 1;
                    }
                }
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Processing(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cmd: &Command) -> Outcome<Summary> {
    match cmd {
        Command::RestoreSky(a) => restore_sky(a),
        Command::RestoreBaseline(a) => restore_baseline_cmd(a),
        Command::RestoreCity(a) => restore_city_cmd(a),
        Command::EstimateLights(a) => estimate_lights(a),
        Command::Simulate(a) => simulate(a),
        Command::Curve(a) => curve(a),
    }
}

fn geometry(img: &RadianceImage, physics: &PhysicsArgs) -> Outcome<(CameraGeometry, Atmosphere)> {
    let (w, h) = img.dims();
    let geom = match physics.focal {
        Some(f) => CameraGeometry::new(w, h, f)?,
        None => CameraGeometry::with_default_focal(w, h)?,
    };
    Ok((geom, Atmosphere::with_beta(physics.beta.0)?))
}

fn physics_echo(geom: &CameraGeometry, atm: &Atmosphere) -> Value {
    json!({
        "beta": atm.beta(),
        "focal_px": geom.focal_px(),
        "width": geom.width(),
        "height": geom.height(),
    })
}

fn read_mask(path: Option<&Path>, img: &RadianceImage) -> Outcome<SkyMask> {
    match path {
        Some(p) => {
            let file = File::open(p).map_err(|e| Error::io(p, e))?;
            Ok(SkyMask::read_csv(file, img.width(), img.height())?)
        }
        None => Ok(detect_skyline(img, None)),
    }
}

fn calibrate(
    img: &RadianceImage,
    sky: &SkyMask,
    cal: &CalibrationArgs,
    transfer: Transfer,
) -> Outcome<CalibrationSet> {
    let path = cal
        .calib
        .as_deref()
        .ok_or_else(|| Failure::Usage("a calibration image (--calib) is required".into()))?;
    let calib = load_image(path, transfer)?;
    let calib_sky = read_mask(cal.calib_mask.as_deref(), &calib)?;
    let opts = AlignOptions {
        row_fractions: cal.rows.0.clone(),
        window: cal.window,
        exposure: cal.exposure,
    };
    if cal.window > img.width() {
        return Err(Failure::Usage(format!(
            "--window {} is wider than the image ({} px)",
            cal.window,
            img.width()
        )));
    }
    Ok(align_calibration(img, sky, &calib, &calib_sky, &opts)?)
}

fn calibration_echo(cal: &CalibrationArgs) -> Value {
    json!({
        "calib": cal.calib,
        "window": cal.window,
        "rows": cal.rows.0,
        "exposure": cal.exposure,
    })
}

fn read_profile(path: &Path) -> Outcome<GroundLightProfile> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(GroundLightProfile::read_csv(file)?)
}

fn write_profile(path: &Path, p: &GroundLightProfile) -> Outcome<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    p.write_csv(BufWriter::new(file))?;
    Ok(())
}

fn write_mask(path: &Path, m: &SkyMask) -> Outcome<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    m.write_csv(BufWriter::new(file))?;
    Ok(())
}

fn write_depth(path: &Path, d: &DepthMap) -> Outcome<()> {
    let raster = ScalarRaster {
        width: d.width(),
        height: d.height(),
        channels: 1,
        data: d.as_slice().to_vec(),
    };
    Ok(write_pfm(path, &raster)?)
}

fn check_scale(flag: &str, v: f64) -> Outcome<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--{flag} must be a positive number, got {v}")))
    }
}

/// Depth from a file, or `ground_depth` below the skyline and infinity above.
fn scene_depth(
    path: Option<&Path>,
    scale: f64,
    ground_depth: f64,
    sky: &SkyMask,
) -> Outcome<DepthMap> {
    check_scale("depth-scale", scale)?;
    if let Some(p) = path {
        return Ok(load_depth(p, scale, sky)?);
    }
    if !(ground_depth > 0.0) {
        return Err(Failure::Usage(format!(
            "--ground-depth must be positive, got {ground_depth}"
        )));
    }
    let (w, h) = sky.dims();
    Ok(DepthMap::from_fn(w, h, |x, y| {
        if sky.is_sky(x, y) {
            DepthMap::INFINITE
        } else {
            ground_depth
        }
    })?)
}

fn save_outputs(
    summary: &mut Summary,
    restored: &Restoration,
    output: &Path,
    encoding: &EncodingArgs,
    veil: &VeilOutputArgs,
) -> Outcome<()> {
    let transfer = encoding.transfer.into();
    save_image(&restored.image, output, transfer, encoding.depth())?;
    summary.outputs.push(output.to_path_buf());
    if let Some(p) = &veil.dump_veil {
        save_image(&restored.veil, p, transfer, encoding.depth())?;
        summary.outputs.push(p.clone());
    }
    Ok(())
}

fn sky_profile(
    img: &RadianceImage,
    sky: &SkyMask,
    lights: Option<&Path>,
    cal: &CalibrationArgs,
    transfer: Transfer,
    geom: &CameraGeometry,
    atm: &Atmosphere,
) -> Outcome<GroundLightProfile> {
    match lights {
        Some(p) => {
            let profile = read_profile(p)?;
            profile.ensure_width(img.width())?;
            Ok(profile)
        }
        None => {
            let set = calibrate(img, sky, cal, transfer)?;
            Ok(adaptive::estimate_light_profile(img, &set, geom, atm)?)
        }
    }
}

fn restore_sky(a: &RestoreSkyArgs) -> Outcome<Summary> {
    let transfer: Transfer = a.encoding.transfer.into();
    let img = load_image(&a.input, transfer)?;
    let (geom, atm) = geometry(&img, &a.physics)?;
    let sky = read_mask(a.cal.mask.as_deref(), &img)?;
    let depth = scene_depth(a.depth.as_deref(), a.depth_scale, a.ground_depth, &sky)?;
    let profile = sky_profile(&img, &sky, a.lights.as_deref(), &a.cal, transfer, &geom, &atm)?;
    let out = adaptive::restore_with_profile(&img, profile, &geom, &atm, &depth)?;
    let mut summary = Summary::new(
        "restore-sky",
        json!({
            "input": a.input,
            "physics": physics_echo(&geom, &atm),
            "calibration": calibration_echo(&a.cal),
            "lights": a.lights,
            "depth": a.depth,
            "depth_scale": a.depth_scale,
            "ground_depth": a.ground_depth,
            "sky_rows": sky.clear_rows(),
        }),
    );
    summary.restoration(&out.restoration, &img);
    summary.profile(&out.profile);
    save_outputs(&mut summary, &out.restoration, &a.output, &a.encoding, &a.veil)?;
    if let Some(p) = &a.lights_out {
        write_profile(p, &out.profile)?;
        summary.outputs.push(p.clone());
    }
    Ok(summary)
}

fn restore_baseline_cmd(a: &RestoreBaselineArgs) -> Outcome<Summary> {
    check_scale("meters-per-unit", a.meters_per_unit)?;
    let transfer: Transfer = a.encoding.transfer.into();
    let img = load_image(&a.input, transfer)?;
    let (geom, atm) = geometry(&img, &a.physics)?;
    let sky = read_mask(a.cal.mask.as_deref(), &img)?;
    let depth = scene_depth(a.depth.as_deref(), a.depth_scale, a.ground_depth, &sky)?;
    let a_const = match a.a {
        Some(t) => t.0,
        None => {
            let set = calibrate(&img, &sky, &a.cal, transfer)?;
            fit_constant_radiance(&img, &set, &atm, &geom, a.meters_per_unit)?
        }
    };
    let params = BaselineParams::new(a_const, atm, geom, a.meters_per_unit)?;
    let out = restore_baseline(&img, &params, &depth)?;
    let mut summary = Summary::new(
        "restore-baseline",
        json!({
            "input": a.input,
            "physics": physics_echo(&geom, &atm),
            "calibration": calibration_echo(&a.cal),
            "a": a_const,
            "meters_per_unit": a.meters_per_unit,
            "depth": a.depth,
            "ground_depth": a.ground_depth,
        }),
    );
    summary.restoration(&out, &img);
    summary.profile(&GroundLightProfile::constant(img.width(), a_const)?);
    save_outputs(&mut summary, &out, &a.output, &a.encoding, &a.veil)?;
    Ok(summary)
}

fn restore_city_cmd(a: &RestoreCityArgs) -> Outcome<Summary> {
    let transfer: Transfer = a.encoding.transfer.into();
    let img = load_image(&a.input, transfer)?;
    let (geom, atm) = geometry(&img, &a.physics)?;
    let gf = GuidedFilterParams::new(a.gf_radius, a.gf_eps, a.depth_scale)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let sky = read_mask(a.cal.mask.as_deref(), &img)?;
    let depth_raw = load_depth(&a.depth, gf.depth_scale, &sky)?;
    let profile = sky_profile(&img, &sky, a.lights.as_deref(), &a.cal, transfer, &geom, &atm)?;
    let (restoration, profile, depth) = if a.raw_depth {
        let out = adaptive::restore_with_profile(&img, profile, &geom, &atm, &depth_raw)?;
        (out.restoration, out.profile, depth_raw)
    } else {
        let out = restore_city_with_profile(&img, profile, &geom, &atm, &depth_raw, &gf)?;
        (out.restoration, out.profile, out.depth)
    };
    let mut summary = Summary::new(
        "restore-city",
        json!({
            "input": a.input,
            "physics": physics_echo(&geom, &atm),
            "calibration": calibration_echo(&a.cal),
            "lights": a.lights,
            "depth": a.depth,
            "depth_scale": a.depth_scale,
            "gf_radius": a.gf_radius,
            "gf_eps": a.gf_eps,
            "raw_depth": a.raw_depth,
        }),
    );
    summary.restoration(&restoration, &img);
    summary.profile(&profile);
    save_outputs(&mut summary, &restoration, &a.output, &a.encoding, &a.veil)?;
    if let Some(p) = &a.dump_depth {
        write_depth(p, &depth)?;
        summary.outputs.push(p.clone());
    }
    if let Some(p) = &a.lights_out {
        write_profile(p, &profile)?;
        summary.outputs.push(p.clone());
    }
    Ok(summary)
}

fn estimate_lights(a: &EstimateLightsArgs) -> Outcome<Summary> {
    let transfer: Transfer = a.transfer.into();
    let img = load_image(&a.input, transfer)?;
    let (geom, atm) = geometry(&img, &a.physics)?;
    let sky = read_mask(a.cal.mask.as_deref(), &img)?;
    let set = calibrate(&img, &sky, &a.cal, transfer)?;
    let profile = adaptive::estimate_light_profile(&img, &set, &geom, &atm)?;
    write_profile(&a.output, &profile)?;
    let mut summary = Summary::new(
        "estimate-lights",
        json!({
            "input": a.input,
            "physics": physics_echo(&geom, &atm),
            "calibration": calibration_echo(&a.cal),
        }),
    );
    summary.profile(&profile);
    summary.outputs.push(a.output.clone());
    Ok(summary)
}

fn simulate(a: &SimulateArgs) -> Outcome<Summary> {
    let built = SimConfig::load(&a.config)?.build()?;
    let polluted = synthesize(&built.scene, built.mode)?;
    let transfer = a.encoding.transfer.into();
    save_image(&polluted, &a.output, transfer, a.encoding.depth())?;
    let scene = &built.scene;
    let mut summary = Summary::new(
        "simulate",
        json!({
            "config": a.config,
            "mode": format!("{:?}", built.mode).to_lowercase(),
            "physics": physics_echo(&scene.geom, &scene.atm),
            "stars": scene.stars.len(),
            "noise_sigma": scene.noise_sigma,
        }),
    );
    summary.outputs.push(a.output.clone());
    if let Some(p) = &a.truth_out {
        save_image(&scene.truth(), p, transfer, a.encoding.depth())?;
        summary.outputs.push(p.clone());
    }
    if let Some(p) = &a.mask_out {
        write_mask(p, &built.sky)?;
        summary.outputs.push(p.clone());
    }
    let profile = match &scene.lights {
        SceneLights::Constant(c) => GroundLightProfile::constant(scene.geom.width(), *c)?,
        SceneLights::Profile(p) => p.clone(),
    };
    summary.profile(&profile);
    if let Some(p) = &a.lights_out {
        write_profile(p, &profile)?;
        summary.outputs.push(p.clone());
    }
    if let Some(p) = &a.depth_out {
        write_depth(p, &scene.depth)?;
        summary.outputs.push(p.clone());
    }
    Ok(summary)
}

fn curve(a: &CurveArgs) -> Outcome<Summary> {
    let atm = Atmosphere::with_beta(a.beta.0)?;
    let curve = emit_irradiance_curve(a.a.0, &atm, a.ymin, a.ymax, a.n)?;
    let file = File::create(&a.output).map_err(|e| Error::io(&a.output, e))?;
    curve.write_csv(BufWriter::new(file))?;
    let mut summary = Summary::new(
        "curve",
        json!({
            "beta": atm.beta(),
            "a": a.a.0,
            "ymin": a.ymin,
            "ymax": a.ymax,
            "n": a.n,
        }),
    );
    summary.outputs.push(a.output.clone());
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn value_parsers() {
        assert_eq!(parse_triple("1e-4").unwrap(), Triple([1e-4; 3]));
        assert_eq!(parse_triple("1,2,3").unwrap(), Triple([1.0, 2.0, 3.0]));
        assert!(parse_triple("1,2").is_err());
        assert_eq!(parse_rows("0.1, 0.5").unwrap(), Rows(vec![0.1, 0.5]));
        assert!(parse_rows("1.0").is_err());
        assert!(parse_window("4").is_err());
        assert_eq!(parse_window("31").unwrap(), 31);
        assert!(parse_bits("12").is_err());
    }

    #[test]
    fn missing_source_is_a_usage_error() {
        assert_eq!(run(["skyclear", "restore-sky", "in.png", "-o", "out.png"]), 2);
        assert_eq!(run(["skyclear", "restore-city", "in.png", "-o", "o.png"]), 2);
        assert_eq!(run(["skyclear", "bogus"]), 2);
        assert_eq!(
            run(["skyclear", "restore-sky", "in.png", "-o", "o.png", "--calib", "c.png", "--lights", "l.csv"]),
            2
        );
    }

    #[test]
    fn missing_file_is_a_processing_error() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("absent.png");
        let out = dir.path().join("out.png");
        let code = run([
            OsString::from("skyclear"),
            "restore-sky".into(),
            input.into(),
            "-o".into(),
            out.into(),
            "--lights".into(),
            "l.csv".into(),
        ]);
        assert_eq!(code, 1);
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(run(["skyclear", "--version"]), 0);
    }
}
