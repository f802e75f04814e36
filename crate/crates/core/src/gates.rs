//! Ensemble CNOT: the control bit A selects which pulse is applied (1 = an
//! inverting pulse, 0 = a dark pulse) and the ensemble state B (0 = ground,
//! 1 = bright) is the target. The output bit is A ⊕ B.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::propagator::{evolve_density, DensityMatrix, IntegratorConfig};
use crate::pulse::PulseSpec;
use crate::quantum_system::{DrivenSystem, QuantumSystem};

pub const DEFAULT_GATE_THRESHOLD: f64 = 0.9;
/// Threshold used to check that the supplied pulses are what they claim.
pub const CLASSIFY_THRESHOLD: f64 = 0.9;

const BRIGHT: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseClass {
    Inverting,
    Dark,
    Neither,
}

impl std::fmt::Display for PulseClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PulseClass::Inverting => "inverting",
            PulseClass::Dark => "dark",
            PulseClass::Neither => "neither",
        })
    }
}

/// Final (ground, bright) populations after applying `pulse` to basis state
/// `initial` (0 or 1).
pub fn apply_pulse(
    pulse: &PulseSpec,
    system: &QuantumSystem,
    initial: usize,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64)> {
    let driven = DrivenSystem::new(system.clone(), pulse.clone());
    let rho0 = DensityMatrix::basis(system.dim(), initial);
    let traj = evolve_density(&driven, &rho0, (pulse.start, pulse.end), cfg)?;
    let p = traj.final_state().populations();
    Ok((p[0], p[BRIGHT]))
}

pub fn classify_pulse(
    pulse: &PulseSpec,
    system: &QuantumSystem,
    threshold: f64,
    cfg: &IntegratorConfig,
) -> Result<PulseClass> {
    let (g0, b0) = apply_pulse(pulse, system, 0, cfg)?;
    if b0 > threshold {
        return Ok(PulseClass::Inverting);
    }
    if g0 > threshold {
        let (_, b1) = apply_pulse(pulse, system, BRIGHT, cfg)?;
        if b1 > threshold {
            return Ok(PulseClass::Dark);
        }
    }
    Ok(PulseClass::Neither)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateRow {
    pub control: u8,
    pub input: u8,
    pub output: u8,
    /// Population of the expected output state A ⊕ B.
    pub fidelity: f64,
}

impl GateRow {
    pub fn expected(&self) -> u8 {
        self.control ^ self.input
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateReport {
    pub rows: Vec<GateRow>,
    pub threshold: f64,
    pub pass: bool,
}

impl GateReport {
    pub fn render(&self) -> String {
        let mut s = String::from("pulse       A  B  A^B  out  fidelity\n");
        for r in &self.rows {
            let name = if r.control == 1 { "inverting" } else { "dark" };
            s.push_str(&format!(
                "{name:<10}  {}  {}  {}    {}    {:.6}\n",
                r.control,
                r.input,
                r.expected(),
                r.output,
                r.fidelity
            ));
        }
        s.push_str(&format!(
            "threshold {:.3}: {}\n",
            self.threshold,
            if self.pass { "PASS" } else { "FAIL" }
        ));
        s
    }
}

/// Table order: (A, B) = (1,1), (1,0), (0,1), (0,0).
const ROWS: [(u8, u8); 4] = [(1, 1), (1, 0), (0, 1), (0, 0)];

/// Evaluates the four rows without checking how the pulses classify.
pub fn truth_table(
    inverting: &PulseSpec,
    dark: &PulseSpec,
    system: &QuantumSystem,
    threshold: f64,
    cfg: &IntegratorConfig,
    mode: ExecMode,
) -> Result<GateReport> {
    let rows: Vec<GateRow> = exec::map(mode, &ROWS, |&(a, b)| {
        let pulse = if a == 1 { inverting } else { dark };
        let (g, e) = apply_pulse(pulse, system, b as usize, cfg)?;
        let output = if e > g { 1 } else { 0 };
        let fidelity = if a ^ b == 1 { e } else { g };
        Ok(GateRow { control: a, input: b, output, fidelity })
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let pass = rows.iter().all(|r| r.fidelity >= threshold && r.output == r.expected());
    Ok(GateReport { rows, threshold, pass })
}

/// Checks the pulse classes, then evaluates the truth table.
pub fn cnot_truth_table(
    inverting: &PulseSpec,
    dark: &PulseSpec,
    system: &QuantumSystem,
    threshold: f64,
    cfg: &IntegratorConfig,
    mode: ExecMode,
) -> Result<GateReport> {
    let inv = classify_pulse(inverting, system, CLASSIFY_THRESHOLD, cfg)?;
    if inv != PulseClass::Inverting {
        return Err(Error::Classification(format!("inverting pulse classified as {inv}")));
    }
    let dk = classify_pulse(dark, system, CLASSIFY_THRESHOLD, cfg)?;
    if dk != PulseClass::Dark {
        return Err(Error::Classification(format!("dark pulse classified as {dk}")));
    }
    truth_table(inverting, dark, system, threshold, cfg, mode)
}
