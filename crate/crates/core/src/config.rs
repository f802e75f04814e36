//! Scenario files: sectioned TOML holding numbers in the units their tags
//! declare. Parsing is strict (unknown keys are rejected); conversion to
//! engine units happens when the runtime types are built.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{ParityScenario, PARITY_THRESHOLD};
use crate::error::{Error, Result};
use crate::gates::DEFAULT_GATE_THRESHOLD;
use crate::propagator::{IntegratorConfig, Method, DEFAULT_SAMPLES};
use crate::pulse::{ChirpCoefficients, EnvelopeShape, EnvelopeSpec, PulseSpec};
use crate::quantum_system::QuantumSystem;
use crate::units::FrequencyUnit;

/// Highest chirp order accepted from configuration files.
pub const MAX_CHIRP_ORDER: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub system: SystemSection,
    pub pulse: PulseSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub outputs: OutputsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gate: Option<GateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beats: Option<BeatsSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default)]
    pub units: FrequencyUnit,
    /// Excited-level detunings Δ_1..Δ_{M−1}.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detunings: Option<Vec<f64>>,
    /// (i, j, V_ij) with 1-based excited-level labels.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub couplings: Vec<(usize, usize, f64)>,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub mu_eff: f64,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { preset: None, units: FrequencyUnit::default(), detunings: None, couplings: Vec::new(), mu_eff: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ChirpUnits {
    #[default]
    #[serde(rename = "rad/ps^n")]
    RadPerPsPower,
    #[serde(rename = "cm^-n")]
    WavenumberPower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub shape: EnvelopeShape,
    /// Peak of μ_eff·ε, in `rabi_units`.
    pub peak_rabi: f64,
    #[serde(default)]
    pub rabi_units: FrequencyUnit,
    pub fwhm_ps: f64,
    #[serde(default)]
    pub center_ps: f64,
    #[serde(default = "zero_chirp")]
    pub chirp: Vec<f64>,
    #[serde(default)]
    pub chirp_units: ChirpUnits,
    #[serde(default = "one_u32")]
    pub photon_order: u32,
    pub start_ps: f64,
    pub end_ps: f64,
    /// Field-free evolution appended after `end_ps`.
    #[serde(default)]
    pub free_evolution_ps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MethodTag {
    #[default]
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default)]
    pub method: MethodTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_ps: Option<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        Self { method: MethodTag::Rk4, step_ps: None, tolerance: default_tolerance(), samples: DEFAULT_SAMPLES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Artifact {
    Populations,
    Eigen,
    Pulse,
    Plot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default = "all_artifacts")]
    pub artifacts: Vec<Artifact>,
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self { artifacts: all_artifacts() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParitySection {
    /// N·φ̇ reached at `reference_time_ps`, rad/ps.
    pub span_rad_per_ps: f64,
    pub reference_time_ps: f64,
    #[serde(default = "default_orders")]
    pub orders: Vec<usize>,
    #[serde(default = "default_parity_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    /// Chirp of the inverting (A = 1) pulse, in the pulse's chirp units.
    pub inverting_chirp: Vec<f64>,
    /// Chirp of the dark (A = 0) pulse.
    pub dark_chirp: Vec<f64>,
    #[serde(default = "default_gate_threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeatsSection {
    #[serde(default = "one_usize")]
    pub level: usize,
}

fn one() -> f64 {
    1.0
}
fn is_one(v: &f64) -> bool {
    *v == 1.0
}
fn one_u32() -> u32 {
    1
}
fn one_usize() -> usize {
    1
}
fn zero_chirp() -> Vec<f64> {
    vec![0.0]
}
fn default_tolerance() -> f64 {
    1e-10
}
fn default_samples() -> usize {
    DEFAULT_SAMPLES
}
fn all_artifacts() -> Vec<Artifact> {
    vec![Artifact::Populations, Artifact::Eigen, Artifact::Pulse, Artifact::Plot]
}
fn default_orders() -> Vec<usize> {
    vec![2, 3, 4, 5]
}
fn default_parity_threshold() -> f64 {
    PARITY_THRESHOLD
}
fn default_gate_threshold() -> f64 {
    DEFAULT_GATE_THRESHOLD
}

fn config_err(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario config serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    /// Checks everything that can be checked without running a simulation.
    pub fn validate(&self) -> Result<()> {
        self.system()?;
        self.pulse()?;
        self.integrator()?;
        if let Some(p) = &self.parity {
            if !(p.reference_time_ps > 0.0) {
                return Err(config_err("parity.reference_time_ps", "must be > 0"));
            }
            if !p.span_rad_per_ps.is_finite() {
                return Err(config_err("parity.span_rad_per_ps", "must be finite"));
            }
            if let Some(bad) = p.orders.iter().find(|&&n| !(2..=MAX_CHIRP_ORDER).contains(&n)) {
                return Err(config_err("parity.orders", format!("order {bad} outside 2..={MAX_CHIRP_ORDER}")));
            }
            if !(p.threshold > 0.0 && p.threshold <= 1.0) {
                return Err(config_err("parity.threshold", "must lie in (0, 1]"));
            }
        }
        if let Some(g) = &self.gate {
            self.chirp_from(&g.inverting_chirp, "gate.inverting_chirp")?;
            self.chirp_from(&g.dark_chirp, "gate.dark_chirp")?;
            if !(g.threshold > 0.0 && g.threshold <= 1.0) {
                return Err(config_err("gate.threshold", "must lie in (0, 1]"));
            }
        }
        if let Some(b) = &self.beats {
            let dim = self.system()?.dim();
            if b.level >= dim {
                return Err(config_err("beats.level", format!("level {} out of range for {dim} levels", b.level)));
            }
        }
        Ok(())
    }

    pub fn system(&self) -> Result<QuantumSystem> {
        let s = &self.system;
        if let Some(name) = &s.preset {
            if s.detunings.is_some() || !s.couplings.is_empty() {
                return Err(config_err("system.preset", "cannot be combined with inline detunings/couplings"));
            }
            let sys = QuantumSystem::preset(name).ok_or_else(|| config_err("system.preset", format!("unknown preset '{name}'")))?;
            if s.mu_eff != 1.0 {
                return QuantumSystem::new(sys.detunings().to_vec(), sys.couplings().to_vec(), s.mu_eff)
                    .map_err(|e| config_err("system.mu_eff", e));
            }
            return Ok(sys);
        }
        let detunings = s
            .detunings
            .as_ref()
            .ok_or_else(|| config_err("system.detunings", "required when no preset is given"))?;
        let detunings = detunings.iter().map(|&d| s.units.to_rad_per_ps(d)).collect();
        let couplings: Vec<_> = s.couplings.iter().map(|&(i, j, v)| (i, j, s.units.to_rad_per_ps(v))).collect();
        QuantumSystem::from_coupling_list(detunings, &couplings, s.mu_eff).map_err(|e| config_err("system", e))
    }

    fn chirp_from(&self, coeffs: &[f64], key: &str) -> Result<ChirpCoefficients> {
        if coeffs.is_empty() {
            return Err(config_err(key, "needs at least one coefficient"));
        }
        if coeffs.len() > MAX_CHIRP_ORDER + 1 {
            return Err(config_err(key, format!("order {} exceeds {MAX_CHIRP_ORDER}", coeffs.len() - 1)));
        }
        match self.pulse.chirp_units {
            ChirpUnits::RadPerPsPower => ChirpCoefficients::new(coeffs.to_vec()),
            ChirpUnits::WavenumberPower => ChirpCoefficients::from_wavenumber_powers(coeffs),
        }
        .map_err(|e| config_err(key, e))
    }

    pub fn pulse(&self) -> Result<PulseSpec> {
        let p = &self.pulse;
        let chirp = self.chirp_from(&p.chirp, "pulse.chirp")?;
        let peak = p.rabi_units.to_rad_per_ps(p.peak_rabi);
        let env = EnvelopeSpec::new(p.shape, peak, p.fwhm_ps, p.center_ps).map_err(|e| config_err("pulse", e))?;
        if !(p.free_evolution_ps >= 0.0) || !p.free_evolution_ps.is_finite() {
            return Err(config_err("pulse.free_evolution_ps", "must be finite and >= 0"));
        }
        PulseSpec::new(env, chirp, p.photon_order, p.start_ps, p.end_ps).map_err(|e| config_err("pulse", e))
    }

    /// Simulation window: the pulse window plus any free evolution.
    pub fn window(&self) -> (f64, f64) {
        (self.pulse.start_ps, self.pulse.end_ps + self.pulse.free_evolution_ps)
    }

    pub fn integrator(&self) -> Result<IntegratorConfig> {
        let i = &self.integrator;
        let cfg = IntegratorConfig {
            method: match i.method {
                MethodTag::Rk4 => Method::Rk4,
                MethodTag::Rk45 => Method::Rk45,
            },
            step: i.step_ps,
            tolerance: i.tolerance,
            samples: i.samples,
        };
        cfg.validate().map_err(|e| config_err("integrator", e))?;
        Ok(cfg)
    }

    pub fn parity_scenario(&self) -> Result<ParityScenario> {
        let p = self.parity.as_ref().ok_or_else(|| config_err("parity", "section missing"))?;
        Ok(ParityScenario {
            pulse: self.pulse()?,
            system: self.system()?,
            span: p.span_rad_per_ps,
            reference_time: p.reference_time_ps,
            integrator: self.integrator()?,
            threshold: p.threshold,
        })
    }

    /// (inverting, dark) pulses sharing the base envelope and window.
    pub fn gate_pulses(&self) -> Result<(PulseSpec, PulseSpec, f64)> {
        let g = self.gate.as_ref().ok_or_else(|| config_err("gate", "section missing"))?;
        let base = self.pulse()?;
        let inv = base.with_chirp(self.chirp_from(&g.inverting_chirp, "gate.inverting_chirp")?);
        let dark = base.with_chirp(self.chirp_from(&g.dark_chirp, "gate.dark_chirp")?);
        Ok((inv, dark, g.threshold))
    }

    pub fn beats_level(&self) -> usize {
        self.beats.as_ref().map_or(1, |b| b.level)
    }
}
