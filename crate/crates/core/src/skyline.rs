//! Sky/ground separation as one skyline row per column.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::filters::median_filter_usize;
use crate::image::RadianceImage;

/// Width of the cross-column median applied to detected skylines.
pub const SKYLINE_MEDIAN_WIDTH: usize = 9;

/// Gradients weaker than this (in display-white units) never count as a skyline edge.
pub const MIN_EDGE_STEP: f64 = 1e-2;

/// Side of the square opening that erases stars before edge search.
pub const STAR_OPENING: usize = 11;

const OTSU_BINS: usize = 64;

/// Per-column index of the first non-sky row; rows strictly above it are sky.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkyMask {
    height: usize,
    skyline: Vec<usize>,
}

impl SkyMask {
    pub fn new(height: usize, skyline: Vec<usize>) -> Result<Self> {
        if skyline.is_empty() {
            return Err(Error::param("sky mask needs at least one column"));
        }
        if let Some(bad) = skyline.iter().find(|&&r| r > height) {
            return Err(Error::param(format!(
                "skyline row {bad} exceeds image height {height}"
            )));
        }
        Ok(Self { height, skyline })
    }

    /// Every pixel is sky.
    pub fn full_sky(width: usize, height: usize) -> Self {
        Self {
            height,
            skyline: vec![height; width],
        }
    }

    /// Skyline at the same row in every column.
    pub fn flat(width: usize, height: usize, row: usize) -> Result<Self> {
        Self::new(height, vec![row; width])
    }

    pub fn width(&self) -> usize {
        self.skyline.len()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width(), self.height)
    }

    pub fn skyline(&self) -> &[usize] {
        &self.skyline
    }

    #[inline]
    pub fn is_sky(&self, x: usize, y: usize) -> bool {
        y < self.skyline[x]
    }

    /// Number of leading rows that are sky in every column.
    pub fn clear_rows(&self) -> usize {
        self.skyline.iter().copied().min().unwrap_or(0)
    }

    /// Row-major boolean raster, `true` for sky.
    pub fn to_raster(&self) -> Vec<bool> {
        let w = self.width();
        (0..self.height * w)
            .map(|i| self.is_sky(i % w, i / w))
            .collect()
    }

    pub fn ensure_dims(&self, dims: (usize, usize)) -> Result<()> {
        if self.dims() != dims {
            return Err(Error::DimensionMismatch {
                what: "sky mask",
                expected: dims,
                actual: self.dims(),
            });
        }
        Ok(())
    }

    /// Writes `column,skyline_row` pairs.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let to_err = |e: csv::Error| Error::param(format!("writing sky mask CSV: {e}"));
        w.write_record(["column", "skyline_row"]).map_err(to_err)?;
        for (x, row) in self.skyline.iter().enumerate() {
            w.write_record([x.to_string(), row.to_string()])
                .map_err(to_err)?;
        }
        w.flush()
            .map_err(|e| Error::param(format!("writing sky mask CSV: {e}")))
    }

    /// Reads `column,skyline_row` pairs; every column in `0..width` must appear once.
    pub fn read_csv<R: Read>(input: R, width: usize, height: usize) -> Result<Self> {
        let mut rows = vec![None; width];
        let mut reader = csv::Reader::from_reader(input);
        for record in reader.deserialize::<(usize, usize)>() {
            let (x, row) =
                record.map_err(|e| Error::param(format!("reading sky mask CSV: {e}")))?;
            let slot = rows.get_mut(x).ok_or_else(|| {
                Error::param(format!("sky mask column {x} is outside width {width}"))
            })?;
            if slot.replace(row).is_some() {
                return Err(Error::param(format!("sky mask column {x} listed twice")));
            }
        }
        let skyline = rows
            .into_iter()
            .enumerate()
            .map(|(x, r)| r.ok_or_else(|| Error::param(format!("sky mask column {x} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(height, skyline)
    }
}

/// Otsu threshold over non-negative samples, or `None` when they are all equal.
fn otsu_threshold(values: &[f64]) -> Option<f64> {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(max > min) {
        return None;
    }
    let span = max - min;
    let mut hist = [0usize; OTSU_BINS];
    for &v in values {
        let b = (((v - min) / span) * OTSU_BINS as f64) as usize;
        hist[b.min(OTSU_BINS - 1)] += 1;
    }
    let total = values.len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &n)| i as f64 * n as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let (mut best, mut best_bin) = (-1.0, 0);
    for (i, &n) in hist.iter().enumerate().take(OTSU_BINS - 1) {
        w0 += n as f64;
        sum0 += i as f64 * n as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1).powi(2);
        if between > best {
            best = between;
            best_bin = i;
        }
    }
    Some(min + span * (best_bin + 1) as f64 / OTSU_BINS as f64)
}

/// One separable pass of a sliding min or max with clamped borders.
fn sweep(data: &[f64], w: usize, h: usize, half: usize, along_x: bool, take_max: bool) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for y in 0..h {
        for x in 0..w {
            let (pos, len) = if along_x { (x, w) } else { (y, h) };
            let lo = pos.saturating_sub(half);
            let hi = (pos + half).min(len - 1);
            let mut acc = if take_max { f64::NEG_INFINITY } else { f64::INFINITY };
            for k in lo..=hi {
                let v = if along_x { data[y * w + k] } else { data[k * w + x] };
                acc = if take_max { acc.max(v) } else { acc.min(v) };
            }
            out[y * w + x] = acc;
        }
    }
    out
}

/// Grey-level opening: removes bright features smaller than `size` pixels.
fn open(data: &[f64], w: usize, h: usize, size: usize) -> Vec<f64> {
    let half = size / 2;
    let eroded = sweep(&sweep(data, w, h, half, true, false), w, h, half, false, false);
    sweep(&sweep(&eroded, w, h, half, true, true), w, h, half, false, true)
}

/// Finds the skyline, or returns `override_mask` unchanged when one is given.
///
/// Stars are first erased by a grey-level opening of the luminance. Each
/// column is then scanned from the top for the first vertical luminance step
/// above that column's Otsu threshold; columns without one are all sky. The
/// per-column rows are then median-filtered across
/// [`SKYLINE_MEDIAN_WIDTH`] columns.
pub fn detect_skyline(img: &RadianceImage, override_mask: Option<&SkyMask>) -> SkyMask {
    if let Some(mask) = override_mask {
        return mask.clone();
    }
    let (w, h) = img.dims();
    let luma = open(&img.luminance(), w, h, STAR_OPENING);
    let mut grad = vec![0.0; h.saturating_sub(1)];
    let raw: Vec<usize> = (0..w)
        .map(|x| {
            for (y, g) in grad.iter_mut().enumerate() {
                *g = (luma[(y + 1) * w + x] - luma[y * w + x]).abs();
            }
            let Some(t) = otsu_threshold(&grad) else {
                return h;
            };
            let t = t.max(MIN_EDGE_STEP);
            grad.iter().position(|&g| g > t).map_or(h, |y| y + 1)
        })
        .collect();
    SkyMask {
        height: h,
        skyline: median_filter_usize(&raw, SKYLINE_MEDIAN_WIDTH),
    }
}
