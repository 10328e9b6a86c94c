//! Veil subtraction shared by every restoration mode.

use crate::error::Result;
use crate::image::RadianceImage;

/// Outcome of subtracting a pollution veil from an observed image.
#[derive(Debug, Clone)]
pub struct Restoration {
    /// Restored image `max(Î - J, 0)`.
    pub image: RadianceImage,
    /// The veil `J` that was subtracted (before clamping).
    pub veil: RadianceImage,
    /// Fraction of samples where `Î - J` was negative and clamped to zero.
    pub clamp_fraction: f64,
}

impl Restoration {
    /// Radiance actually removed, `Σ (Î - I)`, summed over all samples.
    pub fn removed_energy(&self, polluted: &RadianceImage) -> f64 {
        polluted
            .data()
            .iter()
            .zip(self.image.data())
            .map(|(p, r)| p - r)
            .sum()
    }
}

/// `I = max(Î - J, 0)` per sample.
pub fn subtract_veil(polluted: &RadianceImage, veil: RadianceImage) -> Result<Restoration> {
    polluted.ensure_same_dims(&veil, "pollution veil")?;
    let mut clamped = 0usize;
    let data: Vec<f64> = polluted
        .data()
        .iter()
        .zip(veil.data())
        .map(|(p, j)| {
            let v = p - j;
            if v < 0.0 {
                clamped += 1;
                0.0
            } else {
                v
            }
        })
        .collect();
    let clamp_fraction = clamped as f64 / data.len() as f64;
    Ok(Restoration {
        image: RadianceImage::from_valid(polluted.width(), polluted.height(), data),
        veil,
        clamp_fraction,
    })
}
