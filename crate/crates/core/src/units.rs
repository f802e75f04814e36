//! Frequency unit conversions. Everything inside the engine is angular
//! frequency in rad/ps with time in ps.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Speed of light in cm/ps.
pub const SPEED_OF_LIGHT_CM_PER_PS: f64 = 0.029_979_245_8;

/// GHz (ordinary frequency) to rad/ps.
pub fn ghz_to_rad_per_ps(ghz: f64) -> f64 {
    ghz * 2.0 * PI * 1e-3
}

pub fn rad_per_ps_to_ghz(w: f64) -> f64 {
    w / (2.0 * PI * 1e-3)
}

/// cm⁻¹ (wavenumber) to GHz.
pub fn wavenumber_to_ghz(cm: f64) -> f64 {
    cm * 29.979_245_8
}

/// Unit tag used by configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum FrequencyUnit {
    #[serde(rename = "GHz")]
    Ghz,
    #[serde(rename = "cm-1")]
    Wavenumber,
    #[default]
    #[serde(rename = "rad/ps")]
    RadPerPs,
}

impl FrequencyUnit {
    pub fn to_rad_per_ps(self, value: f64) -> f64 {
        match self {
            FrequencyUnit::Ghz => ghz_to_rad_per_ps(value),
            FrequencyUnit::Wavenumber => ghz_to_rad_per_ps(wavenumber_to_ghz(value)),
            FrequencyUnit::RadPerPs => value,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert!((ghz_to_rad_per_ps(1.0) - 2.0 * PI * 1e-3).abs() < 1e-15);
        assert!((rad_per_ps_to_ghz(ghz_to_rad_per_ps(3.23)) - 3.23).abs() < 1e-12);
        assert!((FrequencyUnit::Wavenumber.to_rad_per_ps(1.0) - ghz_to_rad_per_ps(29.9792458)).abs() < 1e-15);
        assert_eq!(FrequencyUnit::RadPerPs.to_rad_per_ps(0.7), 0.7);
    }
}
