//! Per-column radiance of ground artificial lights projected onto the horizon.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// `A(x)` for each channel, one sample per image column.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundLightProfile {
    values: [Vec<f64>; 3],
}

impl GroundLightProfile {
    pub fn new(values: [Vec<f64>; 3]) -> Result<Self> {
        let n = values[0].len();
        if n == 0 || values.iter().any(|v| v.len() != n) {
            return Err(Error::param(
                "ground light profile channels must be non-empty and equally long",
            ));
        }
        if let Some(bad) = values.iter().flatten().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::domain(format!(
                "ground light radiance must be finite and non-negative, found {bad}"
            )));
        }
        Ok(Self { values })
    }

    /// The uniform-radiance special case.
    pub fn constant(width: usize, a: [f64; 3]) -> Result<Self> {
        Self::new(a.map(|v| vec![v; width]))
    }

    pub fn width(&self) -> usize {
        self.values[0].len()
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        &self.values[c]
    }

    #[inline]
    pub fn at(&self, c: usize, x: usize) -> f64 {
        self.values[c][x]
    }

    /// Multiplies every sample by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.values.clone().map(|v| v.into_iter().map(|a| a * k).collect()))
    }

    /// `(min, mean, max)` per channel.
    pub fn stats(&self) -> [(f64, f64, f64); 3] {
        std::array::from_fn(|c| {
            let v = &self.values[c];
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(0.0, f64::max);
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            (min, mean, max)
        })
    }

    pub fn ensure_width(&self, width: usize) -> Result<()> {
        if self.width() != width {
            return Err(Error::DimensionMismatch {
                what: "ground light profile",
                expected: (width, 1),
                actual: (self.width(), 1),
            });
        }
        Ok(())
    }

    /// Writes `x,A_R,A_G,A_B` rows with shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let to_err = |e: csv::Error| Error::param(format!("writing light profile CSV: {e}"));
        w.write_record(["x", "A_R", "A_G", "A_B"]).map_err(to_err)?;
        for x in 0..self.width() {
            w.write_record([
                x.to_string(),
                self.values[0][x].to_string(),
                self.values[1][x].to_string(),
                self.values[2][x].to_string(),
            ])
            .map_err(to_err)?;
        }
        w.flush()
            .map_err(|e| Error::param(format!("writing light profile CSV: {e}")))
    }

    /// Reads `x,A_R,A_G,A_B` rows; columns must be listed in order from 0.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(input);
        let mut values = [Vec::new(), Vec::new(), Vec::new()];
        for (i, record) in reader.deserialize::<(usize, f64, f64, f64)>().enumerate() {
            let (x, r, g, b) =
                record.map_err(|e| Error::param(format!("reading light profile CSV: {e}")))?;
            if x != i {
                return Err(Error::param(format!(
                    "light profile rows must be in column order; expected x = {i}, found {x}"
                )));
            }
            values[0].push(r);
            values[1].push(g);
            values[2].push(b);
        }
        Self::new(values)
    }
}
