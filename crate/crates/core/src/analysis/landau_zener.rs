//! Constant-coupling linear sweep, integrated numerically and compared with
//! the exponential Landau–Zener survival law.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{inner, C64, ZERO};
use crate::propagator::{evolve_statevector, IntegratorConfig};
use crate::quantum_system::{dressed_eigensystem, EigenBasis, FnHamiltonian, HamiltonianSource};

/// The sweep runs until |δ| reaches this multiple of max(Ω, √|δ̇|).
pub const LZ_END_DETUNING_RATIO: f64 = 50.0;

/// exp(−2π Ω²/|δ̇|)
pub fn landau_zener_analytic(omega: f64, sweep_rate: f64) -> f64 {
    (-2.0 * PI * omega * omega / sweep_rate.abs()).exp()
}

/// Probability of remaining in the initial diabatic state |0⟩ after a sweep
/// δ(t) = 2·b2·t with constant coupling Ω.
///
/// The state starts in the adiabatic eigenstate of H(−T) with most |0⟩
/// character and the result is its overlap with the corresponding eigenstate
/// of H(T). At |δ| ≫ Ω these coincide with |0⟩, and projecting on the
/// adiabatic basis removes the slowly decaying finite-window oscillation.
pub fn landau_zener_check(b2: f64, omega: f64) -> Result<f64> {
    let rate = 2.0 * b2;
    if !(rate != 0.0) || !rate.is_finite() || !omega.is_finite() {
        return Err(Error::InvalidParameter(format!("need a finite non-zero sweep rate, got 2·b2 = {rate}")));
    }
    let scale = omega.abs().max(rate.abs().sqrt());
    let t_end = LZ_END_DETUNING_RATIO * scale / rate.abs();
    let source = FnHamiltonian::new(2, move |t: f64, out: &mut [C64]| {
        out.copy_from_slice(&[ZERO, C64::new(omega, 0.0), C64::new(omega, 0.0), C64::new(rate * t, 0.0)]);
    });
    let start = diabatic_ground_like(&source, -t_end)?;
    let traj = evolve_statevector(&source, &start, (-t_end, t_end), &IntegratorConfig::default().with_samples(2))?;
    let end = diabatic_ground_like(&source, t_end)?;
    let last = traj.states.last().expect("two stored states");
    Ok(inner(&end, last).norm_sqr())
}

fn diabatic_ground_like<S: HamiltonianSource>(source: &S, t: f64) -> Result<Vec<C64>> {
    let EigenBasis { vectors, .. } = dressed_eigensystem(&source.snapshot(t), None)?;
    Ok(vectors
        .into_iter()
        .max_by(|a, b| a[0].norm_sqr().total_cmp(&b[0].norm_sqr()))
        .expect("two eigenvectors"))
}
