//! Odd/even chirp-order dichotomy on an isolated two-level system.
//!
//! A single-term chirp b_n tⁿ sweeps the resonance offset as n·b_n·t^(n−1).
//! When that sweep is an odd power of t (n = 2, 4, ...) the detuning changes
//! sign across the pulse and adiabatic following inverts the population. When
//! it is an even power (n = 3, 5, ...) the detuning returns to where it began
//! and the system comes back to its initial state. Orders are labelled by the
//! phase coefficient index n throughout.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::propagator::{evolve_density, DensityMatrix, IntegratorConfig};
use crate::pulse::{ChirpCoefficients, PulseSpec};
use crate::quantum_system::{DrivenSystem, QuantumSystem};

pub const PARITY_THRESHOLD: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityOutcome {
    Inversion,
    Transparency,
}

impl std::fmt::Display for ParityOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ParityOutcome::Inversion => "inversion",
            ParityOutcome::Transparency => "transparency",
        })
    }
}

/// Class a single-term chirp of phase order `order` belongs to.
pub fn expected_parity_class(order: usize) -> ParityOutcome {
    if order.is_multiple_of(2) {
        ParityOutcome::Inversion
    } else {
        ParityOutcome::Transparency
    }
}

/// Pulse, system and integrator shared by every order in a sweep.
#[derive(Debug, Clone)]
pub struct ParityScenario {
    /// Envelope, photon order and window; the chirp is replaced per order.
    pub pulse: PulseSpec,
    pub system: QuantumSystem,
    /// Sweep N·φ̇ reached at `reference_time`, rad/ps. Its sign sets the
    /// sweep direction.
    pub span: f64,
    pub reference_time: f64,
    pub integrator: IntegratorConfig,
    pub threshold: f64,
}

impl ParityScenario {
    pub fn chirp_for(&self, order: usize) -> Result<ChirpCoefficients> {
        ChirpCoefficients::single_term_with_span(order, self.span / self.pulse.photon_order as f64, self.reference_time)
    }

    pub fn pulse_for(&self, order: usize) -> Result<PulseSpec> {
        Ok(self.pulse.with_chirp(self.chirp_for(order)?))
    }

    /// Final (ground, bright) populations starting from the ground state.
    pub fn final_populations(&self, order: usize) -> Result<(f64, f64)> {
        let driven = DrivenSystem::new(self.system.clone(), self.pulse_for(order)?);
        let traj = evolve_density(
            &driven,
            &DensityMatrix::ground(self.system.dim()),
            (self.pulse.start, self.pulse.end),
            &self.integrator,
        )?;
        let p = traj.final_state().populations();
        Ok((p[0], p[1]))
    }
}

pub fn chirp_parity_outcome(order: usize, scenario: &ParityScenario) -> Result<ParityOutcome> {
    if order < 2 {
        return Err(Error::InvalidParameter(format!(
            "chirp order {order} has no frequency sweep; orders start at 2"
        )));
    }
    let (ground, excited) = scenario.final_populations(order)?;
    classify(ground, excited, scenario.threshold)
}

fn classify(ground: f64, excited: f64, threshold: f64) -> Result<ParityOutcome> {
    if excited > threshold {
        Ok(ParityOutcome::Inversion)
    } else if ground > threshold {
        Ok(ParityOutcome::Transparency)
    } else {
        Err(Error::Indeterminate { ground, excited })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParityRow {
    pub order: usize,
    pub final_ground: f64,
    pub final_excited: f64,
    pub outcome: Option<ParityOutcome>,
}

/// One row per order, simulated independently.
pub fn parity_sweep(scenario: &ParityScenario, orders: &[usize], mode: ExecMode) -> Result<Vec<ParityRow>> {
    if let Some(&bad) = orders.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidParameter(format!("chirp order {bad} has no frequency sweep")));
    }
    exec::map(mode, orders, |&order| {
        let (g, e) = scenario.final_populations(order)?;
        Ok(ParityRow {
            order,
            final_ground: g,
            final_excited: e,
            outcome: classify(g, e, scenario.threshold).ok(),
        })
    })
    .into_iter()
    .collect()
}
