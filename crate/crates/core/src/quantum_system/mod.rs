//! Level structure and the FM-frame Hamiltonian.
//!
//! Index 0 is the ground state in every builder. Index 1 is the bright state,
//! the only excited level with a radiative coupling Ω(t) to the ground state.
//! Levels 2.. are dark states reached from the bright state through the
//! time-independent couplings V_ij. Every excited diagonal carries
//! δ_i(t) = Δ_i + N·φ̇(t).

mod dressed;

pub use dressed::{dressed_eigensystem, dressed_frame, DressedFrame, EigenBasis};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};
use crate::pulse::{rabi_frequency, PulseSpec};
use crate::units::ghz_to_rad_per_ps;

/// Name under which the anthracene model is exposed to configs and the CLI.
pub const ANTHRACENE_PRESET: &str = "anthracene-5lvl";

/// Zero-order excited-level energies of the anthracene model, GHz.
pub const ANTHRACENE_DETUNINGS_GHZ: [f64; 4] = [3.23, 1.7, 7.57, 3.7];

/// Intramolecular couplings (i, j, V_ij in GHz) between excited levels,
/// 1-based like the level labels.
pub const ANTHRACENE_COUPLINGS_GHZ: [(usize, usize, f64); 6] = [
    (1, 2, -0.28),
    (1, 3, -4.24),
    (1, 4, -1.86),
    (2, 3, 0.29),
    (2, 4, 1.82),
    (3, 4, 0.94),
];

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSystem {
    dim: usize,
    detunings: Vec<f64>,
    couplings: Vec<Vec<f64>>,
    mu_eff: f64,
}

impl QuantumSystem {
    /// `detunings` has one entry per excited level (rad/ps); `couplings` is the
    /// (M−1)×(M−1) symmetric matrix over excited levels with zero diagonal.
    pub fn new(detunings: Vec<f64>, couplings: Vec<Vec<f64>>, mu_eff: f64) -> Result<Self> {
        let n = detunings.len();
        if n == 0 {
            return Err(Error::InvalidParameter("a system needs at least one excited level".into()));
        }
        if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "{n} detunings need a {n}x{n} coupling matrix"
            )));
        }
        if detunings.iter().chain(couplings.iter().flatten()).any(|v| !v.is_finite())
            || !mu_eff.is_finite()
        {
            return Err(Error::InvalidParameter("system parameters must be finite".into()));
        }
        for i in 0..n {
            if couplings[i][i] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "coupling diagonal must be zero (V_{0}{0} = {1})",
                    i + 1,
                    couplings[i][i]
                )));
            }
            for j in 0..i {
                if couplings[i][j] != couplings[j][i] {
                    return Err(Error::InvalidParameter(format!(
                        "coupling matrix is not symmetric at ({}, {})",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { dim: n + 1, detunings, couplings, mu_eff })
    }

    /// Builds the coupling matrix from a list of (i, j, V) with 1-based
    /// excited-level labels.
    pub fn from_coupling_list(
        detunings: Vec<f64>,
        couplings: &[(usize, usize, f64)],
        mu_eff: f64,
    ) -> Result<Self> {
        let n = detunings.len();
        let mut v = vec![vec![0.0; n]; n];
        for &(i, j, value) in couplings {
            if i == 0 || j == 0 || i > n || j > n || i == j {
                return Err(Error::InvalidParameter(format!(
                    "coupling ({i}, {j}) must join two distinct excited levels in 1..={n}"
                )));
            }
            v[i - 1][j - 1] = value;
            v[j - 1][i - 1] = value;
        }
        Self::new(detunings, v, mu_eff)
    }

    /// Isolated two-level system: ground plus one excited level at detuning Δ.
    pub fn two_level(delta: f64, mu_eff: f64) -> Result<Self> {
        Self::new(vec![delta], vec![vec![0.0]], mu_eff)
    }

    pub fn anthracene() -> Self {
        let detunings = ANTHRACENE_DETUNINGS_GHZ.iter().map(|&g| ghz_to_rad_per_ps(g)).collect();
        let couplings: Vec<_> = ANTHRACENE_COUPLINGS_GHZ
            .iter()
            .map(|&(i, j, g)| (i, j, ghz_to_rad_per_ps(g)))
            .collect();
        Self::from_coupling_list(detunings, &couplings, 1.0).expect("anthracene preset is valid")
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            ANTHRACENE_PRESET => Some(Self::anthracene()),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn detunings(&self) -> &[f64] {
        &self.detunings
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.couplings
    }

    pub fn mu_eff(&self) -> f64 {
        self.mu_eff
    }

    /// Ground plus bright state only, dropping every dark level.
    pub fn two_level_reduction(&self) -> Self {
        Self::two_level(self.detunings[0], self.mu_eff).expect("reduction of a valid system")
    }

    /// Writes H^FM(t) into a row-major buffer of length dim².
    pub fn fill_hamiltonian(&self, t: f64, pulse: &PulseSpec, out: &mut [C64]) {
        let m = self.dim;
        debug_assert_eq!(out.len(), m * m);
        out.iter_mut().for_each(|z| *z = ZERO);
        let omega = rabi_frequency(t, pulse, self.mu_eff);
        out[1] = omega;
        out[m] = omega.conj();
        let shift = pulse.detuning_shift(t);
        for i in 1..m {
            out[i * m + i] = C64::new(self.detunings[i - 1] + shift, 0.0);
            for j in 1..m {
                if i != j {
                    out[i * m + j] = C64::new(self.couplings[i - 1][j - 1], 0.0);
                }
            }
        }
    }
}

/// H^FM at one instant, in rad/ps.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSnapshot {
    pub time: f64,
    pub matrix: CMatrix,
}

/// ħ·[[0, Ω], [Ω*, Δ + N·φ̇(t)]] with the ground state at index 0.
pub fn two_level_hamiltonian(t: f64, pulse: &PulseSpec, delta: f64, mu_eff: f64) -> HamiltonianSnapshot {
    let omega = rabi_frequency(t, pulse, mu_eff);
    let mut matrix = CMatrix::zeros(2);
    matrix[(0, 1)] = omega;
    matrix[(1, 0)] = omega.conj();
    matrix[(1, 1)] = C64::new(delta + pulse.detuning_shift(t), 0.0);
    HamiltonianSnapshot { time: t, matrix }
}

pub fn multilevel_hamiltonian(t: f64, pulse: &PulseSpec, system: &QuantumSystem) -> HamiltonianSnapshot {
    let mut matrix = CMatrix::zeros(system.dim());
    system.fill_hamiltonian(t, pulse, matrix.as_mut_slice());
    HamiltonianSnapshot { time: t, matrix }
}

/// diag(Δ_1..Δ_{M−1}) + V
pub fn excited_submatrix(system: &QuantumSystem) -> Vec<Vec<f64>> {
    let n = system.dim() - 1;
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { system.detunings[i] } else { system.couplings[i][j] })
                .collect()
        })
        .collect()
}

/// Anything that can produce a Hamiltonian at time t.
pub trait HamiltonianSource: Sync {
    fn dim(&self) -> usize;

    /// Writes H(t) row-major into `out` (length dim²).
    fn fill(&self, t: f64, out: &mut [C64]);

    fn snapshot(&self, t: f64) -> HamiltonianSnapshot {
        let mut matrix = CMatrix::zeros(self.dim());
        self.fill(t, matrix.as_mut_slice());
        HamiltonianSnapshot { time: t, matrix }
    }
}

/// A level system under a given pulse.
#[derive(Debug, Clone)]
pub struct DrivenSystem {
    pub system: QuantumSystem,
    pub pulse: PulseSpec,
}

impl DrivenSystem {
    pub fn new(system: QuantumSystem, pulse: PulseSpec) -> Self {
        Self { system, pulse }
    }
}

impl HamiltonianSource for DrivenSystem {
    fn dim(&self) -> usize {
        self.system.dim()
    }

    fn fill(&self, t: f64, out: &mut [C64]) {
        self.system.fill_hamiltonian(t, &self.pulse, out)
    }
}

/// Hamiltonian given by a closure writing into the output buffer.
pub struct FnHamiltonian<F> {
    dim: usize,
    f: F,
}

impl<F> FnHamiltonian<F>
where
    F: Fn(f64, &mut [C64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> HamiltonianSource for FnHamiltonian<F>
where
    F: Fn(f64, &mut [C64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn fill(&self, t: f64, out: &mut [C64]) {
        (self.f)(t, out)
    }
}

/// H ≡ 0 on `dim` levels.
pub fn zero_hamiltonian(dim: usize) -> FnHamiltonian<impl Fn(f64, &mut [C64]) + Sync> {
    FnHamiltonian::new(dim, |_, out: &mut [C64]| out.iter_mut().for_each(|z| *z = ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{ChirpCoefficients, EnvelopeShape, EnvelopeSpec};
    use proptest::prelude::*;

    fn pulse(peak: f64, chirp: &[f64], n: u32) -> PulseSpec {
        PulseSpec::new(
            EnvelopeSpec::new(EnvelopeShape::Gaussian, peak, 100.0, 0.0).unwrap(),
            ChirpCoefficients::new(chirp.to_vec()).unwrap(),
            n,
            -300.0,
            300.0,
        )
        .unwrap()
    }

    #[test]
    fn field_free_resonant_two_level_is_zero() {
        let h = two_level_hamiltonian(3.0, &pulse(0.0, &[0.0], 1), 0.0, 1.0);
        assert_eq!(h.matrix.max_abs(), 0.0);
    }

    #[test]
    fn linear_sweep_enters_excited_diagonal() {
        let b2 = 0.013;
        let t = 42.0;
        let h = two_level_hamiltonian(t, &pulse(0.5, &[0.0, 0.0, b2], 1), 0.0, 1.0);
        assert_eq!(h.matrix[(0, 0)], ZERO);
        assert!((h.matrix[(1, 1)].re - 2.0 * b2 * t).abs() < 1e-15);
    }

    #[test]
    fn multiphoton_offset() {
        // φ̇(t) = b_1 = 0.5, N = 2, Δ = 1
        let h = two_level_hamiltonian(7.0, &pulse(0.5, &[0.0, 0.5], 2), 1.0, 1.0);
        assert_eq!(h.matrix[(1, 1)].re, 2.0);
    }

    #[test]
    fn anthracene_zero_field_matches_tabulated_values() {
        let sys = QuantumSystem::anthracene();
        let h = multilevel_hamiltonian(0.0, &pulse(0.0, &[0.0], 1), &sys);
        let g = ghz_to_rad_per_ps;
        let diag = [0.0, g(3.23), g(1.7), g(7.57), g(3.7)];
        for (i, d) in diag.iter().enumerate() {
            assert!((h.matrix[(i, i)].re - d).abs() < 1e-15);
        }
        let v = [
            ((1, 2), -0.28),
            ((1, 3), -4.24),
            ((1, 4), -1.86),
            ((2, 3), 0.29),
            ((2, 4), 1.82),
            ((3, 4), 0.94),
        ];
        for ((i, j), val) in v {
            assert!((h.matrix[(i, j)].re - g(val)).abs() < 1e-15);
            assert!((h.matrix[(j, i)].re - g(val)).abs() < 1e-15);
        }
        for j in 1..5 {
            assert_eq!(h.matrix[(0, j)], ZERO);
            assert_eq!(h.matrix[(j, 0)], ZERO);
        }
    }

    #[test]
    fn two_level_builders_agree() {
        let p = pulse(0.7, &[0.0, 0.1, 0.02, -0.001], 2);
        let sys = QuantumSystem::two_level(0.3, 1.2).unwrap();
        for &t in &[-120.0, -3.0, 0.0, 55.5] {
            let a = two_level_hamiltonian(t, &p, 0.3, 1.2);
            let b = multilevel_hamiltonian(t, &p, &sys);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn chirp_shifts_every_excited_level_equally() {
        let sys = QuantumSystem::anthracene();
        let flat = multilevel_hamiltonian(30.0, &pulse(0.2, &[0.0], 1), &sys);
        let swept = multilevel_hamiltonian(30.0, &pulse(0.2, &[0.0, 0.0, 0.01], 1), &sys);
        let shift = 2.0 * 0.01 * 30.0;
        assert_eq!(swept.matrix[(0, 0)], ZERO);
        for i in 1..5 {
            let d = swept.matrix[(i, i)].re - flat.matrix[(i, i)].re;
            assert!((d - shift).abs() < 1e-14);
        }
    }

    #[test]
    fn excited_submatrix_examples() {
        let tl = QuantumSystem::two_level(0.25, 1.0).unwrap();
        assert_eq!(excited_submatrix(&tl), vec![vec![0.25]]);

        let free = QuantumSystem::new(vec![1.0, 2.0, 3.0], vec![vec![0.0; 3]; 3], 1.0).unwrap();
        assert_eq!(
            excited_submatrix(&free),
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 2.0, 0.0], vec![0.0, 0.0, 3.0]]
        );

        let sub = excited_submatrix(&QuantumSystem::anthracene());
        let g = ghz_to_rad_per_ps;
        assert!((sub[0][0] - g(3.23)).abs() < 1e-15);
        assert!((sub[0][2] - g(-4.24)).abs() < 1e-15);
        assert!((sub[3][1] - g(1.82)).abs() < 1e-15);
    }

    #[test]
    fn system_validation() {
        assert!(QuantumSystem::new(vec![1.0, 2.0], vec![vec![0.0; 2]], 1.0).is_err());
        assert!(QuantumSystem::new(vec![1.0, 2.0], vec![vec![0.0, 1.0], vec![2.0, 0.0]], 1.0).is_err());
        assert!(QuantumSystem::new(vec![1.0], vec![vec![0.5]], 1.0).is_err());
        assert!(QuantumSystem::from_coupling_list(vec![1.0, 2.0], &[(0, 1, 0.1)], 1.0).is_err());
        assert!(QuantumSystem::preset("no-such-molecule").is_none());
        assert_eq!(QuantumSystem::preset(ANTHRACENE_PRESET).unwrap().dim(), 5);
    }

    proptest! {
        #[test]
        fn hamiltonians_are_hermitian_with_fixed_structure(
            t in -300.0f64..300.0,
            peak in 0.0f64..3.0,
            chirp in prop::collection::vec(-1e-3f64..1e-3, 1..6),
            n in 1u32..4,
        ) {
            let p = pulse(peak, &chirp, n);
            let sys = QuantumSystem::anthracene();
            let h = multilevel_hamiltonian(t, &p, &sys);
            prop_assert!(h.matrix.hermiticity_deviation() < 1e-12);
            prop_assert_eq!(h.matrix[(0, 0)], ZERO);
            for j in 2..5 {
                prop_assert_eq!(h.matrix[(0, j)], ZERO);
            }
            let flat = multilevel_hamiltonian(t, &pulse(peak, &[0.0], n), &sys);
            for i in 0..5 {
                for j in 0..5 {
                    if i != j {
                        // the sweep never leaves the diagonal
                        prop_assert_eq!(h.matrix[(i, j)], flat.matrix[(i, j)]);
                    }
                }
            }
        }

        #[test]
        fn b0_leaves_hamiltonian_unchanged(t in -300.0f64..300.0, b0 in -50.0f64..50.0) {
            let sys = QuantumSystem::anthracene();
            let a = multilevel_hamiltonian(t, &pulse(1.0, &[0.0, 0.01, 2e-4], 1), &sys);
            let b = multilevel_hamiltonian(t, &pulse(1.0, &[b0, 0.01, 2e-4], 1), &sys);
            prop_assert_eq!(a, b);
        }
    }
}
