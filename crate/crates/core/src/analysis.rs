//! Post-processing of sampled survival curves: grids, slope fits, local
//! maxima and spectral peaks.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// `n` points from `lo` to `hi` inclusive.
pub fn time_grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && hi.is_finite()) {
        return Err(Error::domain("time grid needs 0 < t_lo < t_hi"));
    }
    if n < 2 {
        return Err(Error::domain("time grid needs at least 2 samples"));
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            let x = i as f64 / last;
            match spacing {
                Spacing::Linear => lo + (hi - lo) * x,
                Spacing::Log => lo * (hi / lo).powf(x),
            }
        })
        .collect())
}

/// Least-squares line `y = c0 + c1 x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::domain("linear fit needs at least two paired samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(u, v)| (u - mx) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("linear fit needs distinct abscissae"));
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

fn window(t: &[f64], s: &[f64], lo: f64, hi: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if t.len() != s.len() {
        return Err(Error::domain("times and values differ in length"));
    }
    let (tw, sw): (Vec<f64>, Vec<f64>) = t
        .iter()
        .zip(s)
        .filter(|(x, _)| **x >= lo && **x <= hi)
        .map(|(x, y)| (*x, *y))
        .unzip();
    if sw.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::domain("logarithmic fits need positive values"));
    }
    Ok((tw, sw))
}

/// Slope of `ln S` against `t` on `[lo, hi]`.
pub fn log_slope(t: &[f64], s: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let (tw, sw) = window(t, s, lo, hi)?;
    let ln: Vec<f64> = sw.iter().map(|v| v.ln()).collect();
    Ok(linear_fit(&tw, &ln)?.1)
}

/// Slope of `ln S` against `ln t` on `[lo, hi]`.
pub fn loglog_slope(t: &[f64], s: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let (tw, sw) = window(t, s, lo, hi)?;
    let lt: Vec<f64> = tw.iter().map(|v| v.ln()).collect();
    let ls: Vec<f64> = sw.iter().map(|v| v.ln()).collect();
    Ok(linear_fit(&lt, &ls)?.1)
}

/// Interior samples strictly above both neighbours.
pub fn local_maxima(values: &[f64]) -> usize {
    values.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}

/// `S / (c e^{−γt})` with `ln c − γt` the least-squares line through `ln S`.
pub fn divide_exponential_fit(t: &[f64], s: &[f64]) -> Result<Vec<f64>> {
    let (tw, sw) = window(t, s, f64::NEG_INFINITY, f64::INFINITY)?;
    let ln: Vec<f64> = sw.iter().map(|v| v.ln()).collect();
    let (c0, c1) = linear_fit(&tw, &ln)?;
    Ok(tw.iter().zip(&sw).map(|(x, y)| y / (c0 + c1 * x).exp()).collect())
}

/// Frequency (cycles per unit time) of the largest non-DC bin in the DFT of
/// `y − mean(y)`, zero-padded by `pad`. `t` must be uniformly spaced.
pub fn dominant_frequency(t: &[f64], y: &[f64], pad: usize) -> Result<f64> {
    if t.len() != y.len() || t.len() < 4 {
        return Err(Error::domain("spectral peak needs at least four paired samples"));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if t.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0)) {
        return Err(Error::domain("spectral peak needs a uniform grid"));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let n = y.len() * pad.max(1);
    let mut buf: Vec<Complex<f64>> = y.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let (bin, _) = buf[1..=n / 2]
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("at least one non-DC bin");
    Ok((bin + 1) as f64 / (n as f64 * dt))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grids() {
        let g = time_grid(1.0, 100.0, 3, Spacing::Log).unwrap();
        assert!((g[1] - 10.0).abs() < 1e-12);
        let g = time_grid(1.0, 2.0, 5, Spacing::Linear).unwrap();
        assert_eq!(g, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(time_grid(0.0, 1.0, 5, Spacing::Linear).is_err());
        assert!(time_grid(1.0, 2.0, 1, Spacing::Linear).is_err());
    }

    #[test]
    fn slopes_of_exact_laws() {
        let t = time_grid(0.5, 5.0, 200, Spacing::Linear).unwrap();
        let s: Vec<f64> = t.iter().map(|x| 3.0 * (-2.5 * x).exp()).collect();
        assert!((log_slope(&t, &s, 1.0, 4.0).unwrap() + 2.5).abs() < 1e-12);
        let p: Vec<f64> = t.iter().map(|x| 0.2 * x.powi(-3)).collect();
        assert!((loglog_slope(&t, &p, 1.0, 4.0).unwrap() + 3.0).abs() < 1e-12);
        let r = divide_exponential_fit(&t, &s).unwrap();
        assert!(r.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn counts_maxima() {
        assert_eq!(local_maxima(&[0.0, 1.0, 0.0, 2.0, 1.0, 1.0]), 2);
        let t = time_grid(0.01, 2.0, 2000, Spacing::Linear).unwrap();
        let y: Vec<f64> = t.iter().map(|x| (2.0 * PI * 3.0 * x).sin()).collect();
        assert_eq!(local_maxima(&y), 6);
    }

    #[test]
    fn finds_a_pure_tone() {
        let t = time_grid(0.0f64.max(1e-3), 2.0, 1000, Spacing::Linear).unwrap();
        let y: Vec<f64> = t.iter().map(|x| 1.0 + 0.3 * (2.0 * PI * 7.3 * x + 0.4).cos()).collect();
        let f = dominant_frequency(&t, &y, 16).unwrap();
        assert!((f - 7.3).abs() < 0.05, "{f}");
        let log = time_grid(1e-3, 2.0, 100, Spacing::Log).unwrap();
        assert!(dominant_frequency(&log, &log, 4).is_err());
    }
}
