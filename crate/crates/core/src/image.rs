//! Planar three-channel linear radiance raster.

use crate::error::{Error, Result};

/// Rec. 709 luminance weights for linear RGB.
pub const LUMA_WEIGHTS: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// A linear-radiance RGB image stored as three planes (R, G, B), each row-major.
///
/// Samples are finite and non-negative; display white is `1.0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadianceImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RadianceImage {
    /// Builds an image from planar data (`3 * width * height` samples, R plane first).
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::param(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != 3 * width * height {
            return Err(Error::param(format!(
                "expected {} samples for a {width}x{height} image, got {}",
                3 * width * height,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::domain(format!(
                "radiance samples must be finite and non-negative, found {bad}"
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, vec![0.0; 3 * width * height])
    }

    /// Builds an image by evaluating `f(channel, x, y)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(3 * width * height);
        for c in 0..3 {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(c, x, y));
                }
            }
        }
        Self::new(width, height, data)
    }

    /// Builds an image from three equally sized planes.
    pub fn from_planes(width: usize, height: usize, planes: [Vec<f64>; 3]) -> Result<Self> {
        let [r, g, b] = planes;
        let mut data = r;
        data.extend_from_slice(&g);
        data.extend_from_slice(&b);
        Self::new(width, height, data)
    }

    /// Internal constructor for data already known to satisfy the invariants.
    pub(crate) fn from_valid(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), 3 * width * height);
        debug_assert!(data.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self {
            width,
            height,
            data,
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Callers must keep samples finite and non-negative.
    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn row(&self, c: usize, y: usize) -> &[f64] {
        let start = (c * self.height + y) * self.width;
        &self.data[start..start + self.width]
    }

    #[inline]
    pub fn get(&self, c: usize, x: usize, y: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        [self.get(0, x, y), self.get(1, x, y), self.get(2, x, y)]
    }

    /// Rec. 709 luminance plane, row-major.
    pub fn luminance(&self) -> Vec<f64> {
        let (r, g, b) = (self.plane(0), self.plane(1), self.plane(2));
        r.iter()
            .zip(g)
            .zip(b)
            .map(|((r, g), b)| LUMA_WEIGHTS[0] * r + LUMA_WEIGHTS[1] * g + LUMA_WEIGHTS[2] * b)
            .collect()
    }

    pub fn ensure_same_dims(&self, other: &RadianceImage, what: &'static str) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                what,
                expected: self.dims(),
                actual: other.dims(),
            });
        }
        Ok(())
    }

    /// Sum of every sample in every channel.
    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.total() / self.data.len() as f64
    }
}
