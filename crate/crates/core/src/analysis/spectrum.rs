//! Quantum-beat spectra of a population signal: linear detrend, Hann window,
//! ×4 zero padding, FFT power, and local-maximum peaks refined by a parabola
//! through the log-power of the three surrounding bins.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex64, FftPlanner};

use super::PopulationSeries;
use crate::error::{Error, Result};

pub const MIN_SPECTRUM_SAMPLES: usize = 16;
pub const ZERO_PADDING: usize = 4;
/// Peaks below this fraction of the strongest bin are discarded.
pub const PEAK_THRESHOLD: f64 = 0.05;

/// Relative spacing deviation above which the input is resampled.
const UNIFORM_TOLERANCE: f64 = 1e-9;
/// Signals whose detrended standard deviation falls below this carry no beats.
const NOISE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeatPeak {
    /// Angular frequency, rad/ps.
    pub frequency: f64,
    pub power: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeatSpectrum {
    /// Angular frequencies, rad/ps, covering [0, π/Δt).
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub peaks: Vec<BeatPeak>,
    /// 2π/T for a record of length T, rad/ps.
    pub resolution: f64,
    pub sample_interval: f64,
}

pub fn beat_spectrum(series: &PopulationSeries, level: usize, window: Option<(f64, f64)>) -> Result<BeatSpectrum> {
    if level >= series.dim() {
        return Err(Error::InvalidParameter(format!("level {level} out of range")));
    }
    let (times, values): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(&series.populations)
        .filter(|(t, _)| window.is_none_or(|(a, b)| **t >= a && **t <= b))
        .map(|(t, p)| (*t, p[level]))
        .unzip();
    if times.len() < MIN_SPECTRUM_SAMPLES {
        return Err(Error::SeriesTooShort { len: times.len(), min: MIN_SPECTRUM_SAMPLES });
    }
    let (times, mut values) = resample_uniform(&times, &values);
    let n = values.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    detrend(&times, &mut values);

    let mean_sq = values.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let padded = n * ZERO_PADDING;
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(k, v)| Complex64::new(v * hann(k, n), 0.0))
        .chain(std::iter::repeat(Complex64::new(0.0, 0.0)))
        .take(padded)
        .collect();
    FftPlanner::new().plan_fft_forward(padded).process(&mut buf);

    let bins = padded / 2;
    let d_omega = 2.0 * PI / (padded as f64 * dt);
    let frequencies: Vec<f64> = (0..bins).map(|k| k as f64 * d_omega).collect();
    let power: Vec<f64> = buf[..bins].iter().map(|z| z.norm_sqr()).collect();

    let peaks = if mean_sq.sqrt() < NOISE_FLOOR { Vec::new() } else { find_peaks(&power, d_omega) };
    Ok(BeatSpectrum {
        frequencies,
        power,
        peaks,
        resolution: 2.0 * PI / (n as f64 * dt),
        sample_interval: dt,
    })
}

fn hann(k: usize, n: usize) -> f64 {
    0.5 - 0.5 * (2.0 * PI * k as f64 / (n - 1) as f64).cos()
}

fn resample_uniform(times: &[f64], values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= UNIFORM_TOLERANCE * dt.abs().max(f64::MIN_POSITIVE));
    if uniform {
        return (times.to_vec(), values.to_vec());
    }
    let grid: Vec<f64> = (0..n).map(|k| times[0] + k as f64 * dt).collect();
    let mut j = 0;
    let resampled = grid
        .iter()
        .map(|&t| {
            while j + 2 < n && times[j + 1] < t {
                j += 1;
            }
            let (t0, t1) = (times[j], times[j + 1]);
            let w = if t1 > t0 { ((t - t0) / (t1 - t0)).clamp(0.0, 1.0) } else { 0.0 };
            values[j] * (1.0 - w) + values[j + 1] * w
        })
        .collect();
    (grid, resampled)
}

/// Subtracts the least-squares line.
fn detrend(times: &[f64], values: &mut [f64]) {
    let n = values.len() as f64;
    let tm = times.iter().sum::<f64>() / n;
    let vm = values.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in times.iter().zip(values.iter()) {
        sxy += (t - tm) * (v - vm);
        sxx += (t - tm) * (t - tm);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    for (t, v) in times.iter().zip(values.iter_mut()) {
        *v -= vm + slope * (t - tm);
    }
}

fn find_peaks(power: &[f64], d_omega: f64) -> Vec<BeatPeak> {
    let max = power.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let mut peaks = Vec::new();
    for k in 1..power.len().saturating_sub(1) {
        let (a, b, c) = (power[k - 1], power[k], power[k + 1]);
        if b > a && b >= c && b >= PEAK_THRESHOLD * max {
            let (la, lb, lc) = (a.max(f64::MIN_POSITIVE).ln(), b.ln(), c.max(f64::MIN_POSITIVE).ln());
            let denom = la - 2.0 * lb + lc;
            let offset = if denom < 0.0 { (0.5 * (la - lc) / denom).clamp(-0.5, 0.5) } else { 0.0 };
            let power = (lb - 0.25 * (la - lc) * offset).exp();
            peaks.push(BeatPeak { frequency: (k as f64 + offset) * d_omega, power });
        }
    }
    peaks
}
