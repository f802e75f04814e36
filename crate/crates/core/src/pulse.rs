//! Chirped laser pulses: envelope ε(t), Taylor-series phase φ(t), its sweep
//! φ̇(t), and the N-photon Rabi frequency Ω(t) = (μ_eff·ε(t))^N with ħ = 1.
//!
//! Time is in ps and frequencies in rad/ps. Chirp coefficient `b_n` carries
//! units of rad/psⁿ.

use std::f64::consts::LN_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::SPEED_OF_LIGHT_CM_PER_PS;

/// Coefficients `b_0..b_K` of φ(t) = Σ b_n tⁿ.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChirpCoefficients(Vec<f64>);

impl ChirpCoefficients {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(bad) = coeffs.iter().position(|b| !b.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "chirp coefficient b_{bad} is not finite"
            )));
        }
        Ok(Self(coeffs))
    }

    /// Transform-limited pulse (φ ≡ 0).
    pub fn zero() -> Self {
        Self(vec![0.0])
    }

    /// Only `b_order` non-zero.
    pub fn single_term(order: usize, coefficient: f64) -> Result<Self> {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[order] = coefficient;
        Self::new(coeffs)
    }

    /// Single-term chirp whose sweep reaches `span` (rad/ps) at `reference_time`
    /// (ps), i.e. `n·b_n·T^(n−1) = span`. Used to compare orders on an equal
    /// footing, since equal raw `b_n` values differ by powers of the time unit.
    pub fn single_term_with_span(order: usize, span: f64, reference_time: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("order 0 has no frequency sweep".into()));
        }
        if !(reference_time > 0.0) {
            return Err(Error::InvalidParameter("reference time must be positive".into()));
        }
        let b = span / (order as f64 * reference_time.powi(order as i32 - 1));
        Self::single_term(order, b)
    }

    /// Converts coefficients quoted in cm⁻ⁿ under the convention that the
    /// phase is expanded in optical path length x = c·t (c in cm/ps), so that
    /// `b_n[rad/psⁿ] = b_n[cm⁻ⁿ]·cⁿ`.
    pub fn from_wavenumber_powers(coeffs_cm: &[f64]) -> Result<Self> {
        let coeffs = coeffs_cm
            .iter()
            .enumerate()
            .map(|(n, b)| b * SPEED_OF_LIGHT_CM_PER_PS.powi(n as i32))
            .collect();
        Self::new(coeffs)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Highest index K.
    pub fn order(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    /// φ(t), Horner evaluation.
    pub fn phase(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &b| acc * t + b)
    }

    /// φ̇(t) = Σ_{n≥1} n·b_n·t^(n−1).
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (n, &b)| acc * t + n as f64 * b)
    }

    /// φ̈(t) = Σ_{n≥2} n·(n−1)·b_n·t^(n−2).
    pub fn sweep_rate(&self, t: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (n, &b)| acc * t + (n * (n - 1)) as f64 * b)
    }
}

pub fn phase(t: f64, chirp: &ChirpCoefficients) -> f64 {
    chirp.phase(t)
}

pub fn instantaneous_frequency(t: f64, chirp: &ChirpCoefficients) -> f64 {
    chirp.instantaneous_frequency(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeShape {
    Gaussian,
    HyperbolicSecant,
    Constant,
}

/// Field envelope. `fwhm` is the full width at half maximum of the
/// intensity ε², not of the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSpec {
    pub shape: EnvelopeShape,
    pub peak_amplitude: f64,
    pub fwhm: f64,
    pub center: f64,
}

impl EnvelopeSpec {
    pub fn new(shape: EnvelopeShape, peak_amplitude: f64, fwhm: f64, center: f64) -> Result<Self> {
        if !(peak_amplitude >= 0.0) || !peak_amplitude.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "peak amplitude must be finite and >= 0, got {peak_amplitude}"
            )));
        }
        if !(fwhm > 0.0) || !fwhm.is_finite() {
            return Err(Error::InvalidParameter(format!("fwhm must be > 0, got {fwhm}")));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter("envelope center must be finite".into()));
        }
        Ok(Self { shape, peak_amplitude, fwhm, center })
    }

    fn sech_rate(&self) -> f64 {
        // sech²(a·fwhm/2) = 1/2
        2.0 * (1.0 + 2.0_f64.sqrt()).ln() / self.fwhm
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        let x = t - self.center;
        match self.shape {
            EnvelopeShape::Gaussian => {
                self.peak_amplitude * (-2.0 * LN_2 * x * x / (self.fwhm * self.fwhm)).exp()
            }
            EnvelopeShape::HyperbolicSecant => self.peak_amplitude / (self.sech_rate() * x).cosh(),
            EnvelopeShape::Constant => self.peak_amplitude,
        }
    }

    /// dε/dt
    pub fn derivative(&self, t: f64) -> f64 {
        let x = t - self.center;
        match self.shape {
            EnvelopeShape::Gaussian => {
                -4.0 * LN_2 * x / (self.fwhm * self.fwhm) * self.amplitude(t)
            }
            EnvelopeShape::HyperbolicSecant => {
                let a = self.sech_rate();
                -a * self.amplitude(t) * (a * x).tanh()
            }
            EnvelopeShape::Constant => 0.0,
        }
    }
}

pub fn envelope_amplitude(t: f64, env: &EnvelopeSpec) -> f64 {
    env.amplitude(t)
}

/// Complete pulse description. The field is switched on only inside
/// `[start, end]`; outside that window ε = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseSpec {
    pub envelope: EnvelopeSpec,
    pub chirp: ChirpCoefficients,
    pub photon_order: u32,
    pub start: f64,
    pub end: f64,
}

impl PulseSpec {
    pub fn new(
        envelope: EnvelopeSpec,
        chirp: ChirpCoefficients,
        photon_order: u32,
        start: f64,
        end: f64,
    ) -> Result<Self> {
        if photon_order < 1 {
            return Err(Error::InvalidParameter("photon order must be >= 1".into()));
        }
        if !(start < end) || !start.is_finite() || !end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "pulse window requires start < end, got [{start}, {end}]"
            )));
        }
        Ok(Self { envelope, chirp, photon_order, start, end })
    }

    pub fn with_chirp(&self, chirp: ChirpCoefficients) -> Self {
        Self { chirp, ..self.clone() }
    }

    pub fn with_envelope(&self, envelope: EnvelopeSpec) -> Self {
        Self { envelope, ..self.clone() }
    }

    pub fn in_window(&self, t: f64) -> bool {
        t >= self.start && t <= self.end
    }

    pub fn field(&self, t: f64) -> f64 {
        if self.in_window(t) {
            self.envelope.amplitude(t)
        } else {
            0.0
        }
    }

    pub fn field_derivative(&self, t: f64) -> f64 {
        if self.in_window(t) {
            self.envelope.derivative(t)
        } else {
            0.0
        }
    }

    /// N·φ̇(t), the resonance offset added to every excited level.
    pub fn detuning_shift(&self, t: f64) -> f64 {
        self.photon_order as f64 * self.chirp.instantaneous_frequency(t)
    }

    /// d/dt of N·φ̇(t).
    pub fn detuning_shift_rate(&self, t: f64) -> f64 {
        self.photon_order as f64 * self.chirp.sweep_rate(t)
    }

    /// Intensity-FWHM span centred on the envelope peak.
    pub fn fwhm_window(&self) -> (f64, f64) {
        let half = 0.5 * self.envelope.fwhm;
        (self.envelope.center - half, self.envelope.center + half)
    }
}

/// Ω(t) = (μ_eff·ε(t))^N. The laser phase is carried by the FM frame, so the
/// value is real; it is returned as complex for use as a matrix element.
pub fn rabi_frequency(t: f64, pulse: &PulseSpec, mu_eff: f64) -> Complex64 {
    Complex64::new((mu_eff * pulse.field(t)).powi(pulse.photon_order as i32), 0.0)
}

/// dΩ/dt for the real Rabi frequency.
pub fn rabi_frequency_derivative(t: f64, pulse: &PulseSpec, mu_eff: f64) -> f64 {
    let n = pulse.photon_order as i32;
    let x = mu_eff * pulse.field(t);
    n as f64 * x.powi(n - 1) * mu_eff * pulse.field_derivative(t)
}
