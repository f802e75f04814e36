use crate::pulse::{rabi_frequency, rabi_frequency_derivative, PulseSpec};
use crate::quantum_system::QuantumSystem;

/// Probe points across the pulse window.
const MARGIN_PROBES: usize = 20_001;

/// Adiabaticity of the ground/bright pair: min over the pulse window of
/// Ω_gen/|θ̇|, where Ω_gen = √(δ² + 4Ω²) is the dressed splitting and
/// θ = atan2(2Ω, δ) the mixing angle. At a resonance crossing with constant
/// Ω this is Ω_gen²/|δ̇|. Instants where θ does not move (including
/// field-free instants with no sweep) are skipped; with none left the
/// margin is +∞.
pub fn adiabaticity_margin(pulse: &PulseSpec, system: &QuantumSystem) -> f64 {
    let delta0 = system.detunings()[0];
    let mu = system.mu_eff();
    let mut margin = f64::INFINITY;
    for k in 0..MARGIN_PROBES {
        let t = pulse.start + (pulse.end - pulse.start) * k as f64 / (MARGIN_PROBES - 1) as f64;
        let omega = rabi_frequency(t, pulse, mu).re;
        let omega_dot = rabi_frequency_derivative(t, pulse, mu);
        let delta = delta0 + pulse.detuning_shift(t);
        let delta_dot = pulse.detuning_shift_rate(t);
        if omega == 0.0 && delta_dot == 0.0 {
            continue;
        }
        let gen_sq = delta * delta + 4.0 * omega * omega;
        if gen_sq == 0.0 {
            continue;
        }
        let theta_dot = 2.0 * (omega_dot * delta - omega * delta_dot) / gen_sq;
        if theta_dot == 0.0 {
            continue;
        }
        margin = margin.min(gen_sq.sqrt() / theta_dot.abs());
    }
    margin
}
