use super::PopulationSeries;
use crate::error::{Error, Result};
use crate::pulse::PulseSpec;

/// Bright-state statistics over the pulse's intensity-FWHM span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockReport {
    pub window: (f64, f64),
    pub min_bright: f64,
    pub mean_bright: f64,
    pub max_bright: f64,
    pub final_bright: f64,
    pub final_ground: f64,
}

impl LockReport {
    /// min/max of the bright population inside the window.
    pub fn flatness(&self) -> f64 {
        if self.max_bright > 0.0 {
            self.min_bright / self.max_bright
        } else {
            0.0
        }
    }
}

pub fn lock_report(series: &PopulationSeries, pulse: &PulseSpec, bright_index: usize) -> Result<LockReport> {
    if bright_index >= series.dim() {
        return Err(Error::InvalidParameter(format!(
            "bright index {bright_index} out of range for {} levels",
            series.dim()
        )));
    }
    let (ta, tb) = pulse.fwhm_window();
    let (first, last) = match (series.times.first(), series.times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::WindowOutOfRange { start: ta, end: tb }),
    };
    if ta < first || tb > last {
        return Err(Error::WindowOutOfRange { start: ta, end: tb });
    }
    let inside: Vec<f64> = series
        .times
        .iter()
        .zip(&series.populations)
        .filter(|(t, _)| **t >= ta && **t <= tb)
        .map(|(_, p)| p[bright_index])
        .collect();
    if inside.is_empty() {
        return Err(Error::WindowOutOfRange { start: ta, end: tb });
    }
    let min_bright = inside.iter().copied().fold(f64::INFINITY, f64::min);
    let max_bright = inside.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean_bright = inside.iter().sum::<f64>() / inside.len() as f64;
    let last_p = series.final_populations();
    Ok(LockReport {
        window: (ta, tb),
        min_bright,
        mean_bright,
        max_bright,
        final_bright: last_p[bright_index],
        final_ground: last_p[0],
    })
}
