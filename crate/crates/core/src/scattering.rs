//! Atmospheric scattering primitives.
//!
//! Ground lights of uniform radiance `A` spread over the plane produce, at altitude
//! `y`, the irradiance
//!
//! ```text
//! E(y) = ∫₀^∞ A e^{-β√(x²+y²)} / (x²+y²) · 2πx dx  =  2πA ∫_y^∞ e^{-βl}/l dl  =  2πA·E1(βy)
//! ```
//!
//! Both the disk integral and the exponential-integral form are provided; the
//! former is the independent cross-check of the latter.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::model::{Atmosphere, Y_FLOOR_M};
use crate::quadrature;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Bouguer attenuation `e0·exp(-β·d)`.
pub fn attenuate(e0: f64, beta: f64, d: f64) -> Result<f64> {
    if !(e0 >= 0.0) || !(beta > 0.0) || !(d >= 0.0) {
        return Err(Error::domain(format!(
            "attenuate needs e0 >= 0, beta > 0, d >= 0 (got {e0}, {beta}, {d})"
        )));
    }
    Ok(e0 * (-beta * d).exp())
}

/// Irradiance from an isotropic point source at distance `d`: `e0·exp(-β·d)/d²`.
pub fn point_source_irradiance(e0: f64, beta: f64, d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::domain(format!(
            "point source irradiance is singular at d = {d}"
        )));
    }
    Ok(attenuate(e0, beta, d)? / (d * d))
}

/// Exponential integral `E1(u) = ∫_u^∞ e^{-t}/t dt` for `u > 0`.
pub fn exp_integral_e1(u: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::domain(format!("E1 is undefined for u = {u}")));
    }
    Ok(e1(u))
}

/// `E1(u)` without argument checks; `u` must be positive.
#[inline]
pub(crate) fn e1(u: f64) -> f64 {
    if u <= 1.0 {
        e1_series(u)
    } else {
        e1_scaled_cf(u) * (-u).exp()
    }
}

/// `-γ - ln u - Σ_{n≥1} (-u)ⁿ / (n·n!)`, accurate for `0 < u ≤ 1`.
fn e1_series(u: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // (-u)^n / n!
    for n in 1..60 {
        term *= -u / n as f64;
        let contrib = term / n as f64;
        sum += contrib;
        if contrib.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - u.ln() - sum
}

/// `e^u·E1(u)` by the modified Lentz evaluation of the continued fraction
/// `1/(u+1- 1/(u+3- 4/(u+5- ...)))`, accurate for `u ≥ 1`.
fn e1_scaled_cf(u: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = u + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `E(y) = 2πA·E1(βy)` per channel.
pub fn irradiance_at_altitude(a: [f64; 3], atm: &Atmosphere, y: f64) -> Result<[f64; 3]> {
    check_irradiance_args(a, y)?;
    let beta = atm.beta();
    Ok(std::array::from_fn(|c| {
        2.0 * PI * a[c] * e1(beta[c] * y)
    }))
}

/// `E(y)` by direct adaptive quadrature of the disk integral over ground distance `x`.
///
/// The integrand is carried with the factor `e^{βy}` removed so that its relative
/// accuracy survives large `βy`; the factor is applied once at the end.
pub fn irradiance_at_altitude_quadrature(
    a: [f64; 3],
    atm: &Atmosphere,
    y: f64,
) -> Result<[f64; 3]> {
    check_irradiance_args(a, y)?;
    let beta = atm.beta();
    let tol = atm.quad_rel_tol();
    let mut out = [0.0; 3];
    for c in 0..3 {
        if a[c] == 0.0 {
            continue;
        }
        let b = beta[c];
        let integrand = |x: f64| {
            let r2 = x * x + y * y;
            let r = r2.sqrt();
            // r - y without cancellation
            let excess = x * x / (r + y);
            2.0 * PI * x * (-b * excess).exp() / r2
        };
        // For x ≥ b_: ∫ 2πx e^{-β(r-y)}/r² dx ≤ 2π e^{-β(b_-y)} / (β b_).
        let tail = |edge: f64| 2.0 * PI * (-b * (edge - y)).exp() / (b * edge);
        let end = y + atm.tau_max_factor() / b;
        let mut scaled = quadrature::integrate_doubling(&integrand, 0.0, end, y, 0.1 * tol, tail);
        if quadrature_needs_more(tail(end), scaled, tol) {
            scaled += quadrature::integrate_doubling(
                &integrand,
                end,
                f64::INFINITY,
                end,
                0.1 * tol,
                tail,
            );
        }
        out[c] = a[c] * scaled * (-b * y).exp();
    }
    Ok(out)
}

fn quadrature_needs_more(tail: f64, acc: f64, tol: f64) -> bool {
    tail > 0.01 * tol * acc
}

fn check_irradiance_args(a: [f64; 3], y: f64) -> Result<()> {
    if !(y >= Y_FLOOR_M) {
        return Err(Error::domain(format!(
            "altitude {y} m is below the {Y_FLOOR_M} m floor"
        )));
    }
    if let Some(bad) = a.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!(
            "ground radiance must be finite and non-negative, got {bad}"
        )));
    }
    Ok(())
}

/// `E(y)` sampled on a log-spaced altitude grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceCurve {
    altitudes: Vec<f64>,
    values: Vec<[f64; 3]>,
}

impl IrradianceCurve {
    pub fn altitudes(&self) -> &[f64] {
        &self.altitudes
    }

    /// Per-sample irradiance, one `[R, G, B]` triple per altitude.
    pub fn values(&self) -> &[[f64; 3]] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.altitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.altitudes.is_empty()
    }

    /// Writes `altitude_m,E_R,E_G,E_B` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let to_err = |e: csv::Error| Error::param(format!("writing curve CSV: {e}"));
        w.write_record(["altitude_m", "E_R", "E_G", "E_B"])
            .map_err(to_err)?;
        for (y, v) in self.altitudes.iter().zip(&self.values) {
            w.write_record([y.to_string(), v[0].to_string(), v[1].to_string(), v[2].to_string()])
                .map_err(to_err)?;
        }
        w.flush()
            .map_err(|e| Error::param(format!("writing curve CSV: {e}")))?;
        Ok(())
    }
}

/// Evaluates `E(y)` at `n` log-spaced altitudes in `[y_min, y_max]`.
pub fn emit_irradiance_curve(
    a: [f64; 3],
    atm: &Atmosphere,
    y_min: f64,
    y_max: f64,
    n: usize,
) -> Result<IrradianceCurve> {
    if !(y_min > 0.0 && y_min < y_max && y_max.is_finite()) {
        return Err(Error::domain(format!(
            "curve range must satisfy 0 < y_min < y_max, got [{y_min}, {y_max}]"
        )));
    }
    if n < 2 {
        return Err(Error::param(format!("curve needs at least 2 samples, got {n}")));
    }
    let ratio = (y_max / y_min).ln();
    let mut altitudes = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let y = if i + 1 == n {
            y_max
        } else {
            y_min * (ratio * i as f64 / (n - 1) as f64).exp()
        };
        altitudes.push(y);
        values.push(irradiance_at_altitude(a, atm, y)?);
    }
    for c in 0..3 {
        if a[c] > 0.0 && values.windows(2).any(|w| !(w[1][c] < w[0][c])) {
            return Err(Error::domain(format!(
                "channel {c} irradiance is not strictly decreasing over [{y_min}, {y_max}] (underflow)"
            )));
        }
    }
    Ok(IrradianceCurve { altitudes, values })
}
