//! Adaptive Simpson quadrature with a fixed evaluation order.
//!
//! Results depend only on the integrand and the tolerance, never on thread
//! scheduling, so callers may run many integrals in parallel and still get
//! bit-identical output.

const MAX_DEPTH: u32 = 50;
const INITIAL_PANELS: usize = 8;

#[inline]
fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

/// Integrates `f` over `[a, b]` to an absolute tolerance.
pub fn integrate_abs<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let tol = abs_tol / INITIAL_PANELS as f64;
    let mut sum = 0.0;
    let mut x0 = a;
    let mut f0 = f(a);
    for i in 0..INITIAL_PANELS {
        let x1 = if i + 1 == INITIAL_PANELS {
            b
        } else {
            a + width * (i + 1) as f64
        };
        let xm = 0.5 * (x0 + x1);
        let fm = f(xm);
        let f1 = f(x1);
        let whole = simpson(f0, fm, f1, x1 - x0);
        sum += refine(f, x0, x1, f0, fm, f1, whole, tol, 0);
        x0 = x1;
        f0 = f1;
    }
    sum
}

/// Integrates `f` over `[a, b]` to a tolerance relative to the integral itself.
///
/// The magnitude is estimated from a 64-panel composite Simpson pass before refinement.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let scale = composite_simpson(f, a, b, 64).abs();
    if scale == 0.0 {
        // Either the integrand vanishes or it is too narrow for the coarse
        // grid to see; fall back to a tiny absolute target.
        return integrate_abs(f, a, b, f64::MIN_POSITIVE);
    }
    integrate_abs(f, a, b, rel_tol * scale)
}

/// Composite Simpson rule with `panels` panels (rounded up to even).
pub fn composite_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + h * i as f64);
    }
    sum * h / 3.0
}

/// Integrates over `[start, end)` (with `end` possibly infinite) using panels whose
/// widths double, beginning with `first_width`.
///
/// Integration stops at `end` or as soon as `tail_bound(b)`, an upper bound on the
/// integral over `[b, ∞)`, drops below `rel_tol` times the accumulated value.
pub fn integrate_doubling<F, T>(
    f: &F,
    start: f64,
    end: f64,
    first_width: f64,
    rel_tol: f64,
    tail_bound: T,
) -> f64
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let mut acc: f64 = 0.0;
    let mut lo = start;
    let mut width = first_width;
    while lo < end {
        let hi = (lo + width).min(end);
        let coarse = composite_simpson(f, lo, hi, 16).abs();
        let target = rel_tol * coarse.max(acc.abs());
        let piece = if target > 0.0 {
            integrate_abs(f, lo, hi, target)
        } else {
            integrate_abs(f, lo, hi, f64::MIN_POSITIVE)
        };
        acc += piece;
        lo = hi;
        width *= 2.0;
        if lo < end && acc > 0.0 && tail_bound(lo) <= 0.1 * rel_tol * acc {
            break;
        }
        if !lo.is_finite() {
            break;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12);
        assert!((v - 0.0).abs() < 1e-12);
        let v = integrate(&|x: f64| 3.0 * x * x, 1.0, 2.0, 1e-12);
        assert!((v - 7.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_transcendental() {
        let v = integrate(&|x: f64| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn doubling_panels_reach_infinity() {
        // ∫_1^∞ e^{-x} dx = e^{-1}
        let v = integrate_doubling(
            &|x: f64| (-x).exp(),
            1.0,
            f64::INFINITY,
            1.0,
            1e-12,
            |b| (-b).exp(),
        );
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(&|x: f64| x, 2.0, 1.0, 1e-9), 0.0);
    }
}
