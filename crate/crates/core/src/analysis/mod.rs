//! Observables extracted from trajectories.

mod adiabatic;
mod landau_zener;
mod lock;
mod parity;
mod spectrum;

pub use adiabatic::adiabaticity_margin;
pub use landau_zener::{landau_zener_analytic, landau_zener_check, LZ_END_DETUNING_RATIO};
pub use lock::{lock_report, LockReport};
pub use parity::{
    chirp_parity_outcome, expected_parity_class, parity_sweep, ParityOutcome, ParityRow, ParityScenario,
    PARITY_THRESHOLD,
};
pub use spectrum::{beat_spectrum, BeatPeak, BeatSpectrum, MIN_SPECTRUM_SAMPLES, PEAK_THRESHOLD, ZERO_PADDING};

use crate::propagator::{DensityTrajectory, StateTrajectory};

/// P_i(t) = Re ρ_ii(t) on the trajectory grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
}

impl PopulationSeries {
    pub fn dim(&self) -> usize {
        self.populations.first().map_or(0, Vec::len)
    }

    pub fn level(&self, level: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[level]).collect()
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations.last().map(Vec::as_slice).unwrap_or(&[])
    }

    /// max_t |Σ_i P_i(t) − 1|
    pub fn closure_error(&self) -> f64 {
        self.populations
            .iter()
            .map(|p| (p.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn from_states(traj: &StateTrajectory) -> Self {
        Self {
            times: traj.times.clone(),
            populations: traj.states.iter().map(|psi| psi.iter().map(|z| z.norm_sqr()).collect()).collect(),
        }
    }
}

pub fn populations(traj: &DensityTrajectory) -> PopulationSeries {
    let populations = traj
        .states
        .iter()
        .map(|rho| {
            let m = rho.matrix();
            (0..m.dim())
                .map(|i| {
                    let z = m[(i, i)];
                    assert!(z.im.abs() < 1e-10, "population has imaginary part {}", z.im);
                    z.re
                })
                .collect()
        })
        .collect();
    PopulationSeries { times: traj.times.clone(), populations }
}
