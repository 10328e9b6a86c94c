//! One-dimensional window filters.

use crate::error::{Error, Result};

fn check_window(len: usize, window: usize) -> Result<()> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::param(format!(
            "filter window must be odd and at least 3, got {window}"
        )));
    }
    if window > len {
        return Err(Error::param(format!(
            "filter window {window} is larger than the signal ({len} samples)"
        )));
    }
    Ok(())
}

/// Applies `reduce` to every edge-replicated window of odd width `window`.
fn windowed<T: Copy>(signal: &[T], window: usize, mut reduce: impl FnMut(&mut [T]) -> T) -> Vec<T> {
    let half = window / 2;
    let last = signal.len() - 1;
    let mut buf = Vec::with_capacity(window);
    (0..signal.len())
        .map(|i| {
            buf.clear();
            for k in 0..window {
                let j = (i + k).saturating_sub(half).min(last);
                buf.push(signal[j]);
            }
            reduce(&mut buf)
        })
        .collect()
}

fn median_in_place(buf: &mut [f64]) -> f64 {
    let mid = buf.len() / 2;
    *buf.select_nth_unstable_by(mid, f64::total_cmp).1
}

/// Sliding minimum with edge replication.
pub fn min_filter(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(signal.len(), window)?;
    Ok(windowed(signal, window, |w| {
        w.iter().copied().fold(f64::INFINITY, f64::min)
    }))
}

/// Sliding median with edge replication.
pub fn median_filter(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(signal.len(), window)?;
    Ok(windowed(signal, window, median_in_place))
}

/// Quasi-quartile background estimate: `(min + median) / 2` over each window.
///
/// Narrow bright impulses (stars) never reach the lower half of a window, so
/// they vanish from both terms.
pub fn quasi_quartile(signal: &[f64], window: usize) -> Result<Vec<f64>> {
    check_window(signal.len(), window)?;
    Ok(windowed(signal, window, |w| {
        let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
        let med = median_in_place(w);
        0.5 * (lo + med)
    }))
}

/// Width-`window` median of integer samples with edge replication.
pub(crate) fn median_filter_usize(signal: &[usize], window: usize) -> Vec<usize> {
    if signal.is_empty() {
        return Vec::new();
    }
    windowed(signal, window.min(2 * signal.len() - 1) | 1, |w| {
        let mid = w.len() / 2;
        *w.select_nth_unstable(mid).1
    })
}

/// Gaussian smoothing with odd reflection at both ends.
///
/// Samples past an end are mirrored through the end sample (`2·s[0] - s[k]`), which
/// leaves linear trends untouched instead of bending them toward the edge value.
pub fn gaussian_smooth(signal: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!("smoothing sigma must be positive, got {sigma}")));
    }
    let n = signal.len();
    if n < 2 {
        return Ok(signal.to_vec());
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|k| (-0.5 * (k as f64 / sigma).powi(2)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let last = (n - 1) as isize;
    let sample = |i: isize| -> f64 {
        if i < 0 {
            let j = (-i).min(last);
            2.0 * signal[0] - signal[j as usize]
        } else if i > last {
            let j = (2 * last - i).max(0);
            2.0 * signal[last as usize] - signal[j as usize]
        } else {
            signal[i as usize]
        }
    };
    Ok((0..n as isize)
        .map(|i| {
            kernel
                .iter()
                .zip(-radius..=radius)
                .map(|(w, k)| w * sample(i + k))
                .sum::<f64>()
                / norm
        })
        .collect())
}
