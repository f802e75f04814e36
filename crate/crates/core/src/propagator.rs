//! Integration of the Liouville–von Neumann equation dρ/dt = i[ρ, H] (ħ = 1)
//! and, as an independent cross-check, the Schrödinger equation i dψ/dt = Hψ.
//!
//! Both share one Runge–Kutta engine. Fixed-step RK4 is the default; the
//! step is chosen from the largest Hamiltonian norm over the window when not
//! given. Dormand–Prince RK45 is available for adaptive stepping. The stored
//! grid is uniform and independent of the internal step; integration always
//! lands exactly on stored times. ρ is never renormalized.

use crate::error::{Error, Result};
use crate::linalg::{liouville_rhs, norm_sqr, schrodinger_rhs, CMatrix, C64, ZERO};
use crate::quantum_system::{dressed_eigensystem, HamiltonianSnapshot, HamiltonianSource};

/// Default number of stored time points.
pub const DEFAULT_SAMPLES: usize = 2000;

/// The automatic step is this fraction of 1/‖H‖_max.
pub const STEP_SAFETY: f64 = 1.0 / 50.0;

/// Number of probes used to estimate ‖H‖_max over a window.
const NORM_PROBES: usize = 4001;

const DENSITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and eigenvalues in [0, 1], each to 1e-9.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dev = matrix.hermiticity_deviation();
        if dev > DENSITY_TOLERANCE {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOLERANCE {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} != 1")));
        }
        let eig = dressed_eigensystem(&HamiltonianSnapshot { time: 0.0, matrix: matrix.clone() }, None)?;
        if eig.values.iter().any(|&l| !(-DENSITY_TOLERANCE..=1.0 + DENSITY_TOLERANCE).contains(&l)) {
            return Err(Error::InvalidParameter(format!(
                "density matrix eigenvalues {:?} outside [0, 1]",
                eig.values
            )));
        }
        Ok(Self(matrix))
    }

    /// |k⟩⟨k|
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self(m)
    }

    pub fn ground(dim: usize) -> Self {
        Self::basis(dim, 0)
    }

    /// ψψ† of a normalized state.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = norm_sqr(psi);
        if (n - 1.0).abs() > DENSITY_TOLERANCE {
            return Err(Error::InvalidParameter(format!("state norm² {n} != 1")));
        }
        Ok(Self(CMatrix::outer(psi)))
    }

    pub(crate) fn from_raw(matrix: CMatrix) -> Self {
        Self(matrix)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.diagonal_re()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// Tr ρ²
    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace().re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rk4,
    Rk45,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// RK4 step in ps; `None` picks it from the Hamiltonian norm.
    pub step: Option<f64>,
    /// RK45 local error tolerance (absolute, per component).
    pub tolerance: f64,
    /// Stored grid size, at least 2.
    pub samples: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { method: Method::Rk4, step: None, tolerance: 1e-10, samples: DEFAULT_SAMPLES }
    }
}

impl IntegratorConfig {
    pub fn with_step(self, step: f64) -> Self {
        Self { step: Some(step), ..self }
    }

    pub fn with_samples(self, samples: usize) -> Self {
        Self { samples, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.step {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter(format!("step must be positive and finite, got {h}")));
            }
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive and finite, got {}",
                self.tolerance
            )));
        }
        if self.samples < 2 {
            return Err(Error::InvalidParameter("at least 2 stored samples required".into()));
        }
        Ok(())
    }
}

/// Estimate of max_t ‖H(t)‖ as (max |H_ij|)·M over a probe grid.
pub fn max_hamiltonian_norm<S: HamiltonianSource + ?Sized>(source: &S, t0: f64, t1: f64) -> f64 {
    let dim = source.dim();
    let mut buf = vec![ZERO; dim * dim];
    let mut worst = 0.0_f64;
    for k in 0..NORM_PROBES {
        let t = t0 + (t1 - t0) * k as f64 / (NORM_PROBES - 1) as f64;
        source.fill(t, &mut buf);
        let m = buf.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        worst = worst.max(m);
    }
    worst * dim as f64
}

/// Default RK4 step for a window: (1/50)/‖H‖_max, capped at the window length.
pub fn auto_step<S: HamiltonianSource + ?Sized>(source: &S, t0: f64, t1: f64) -> f64 {
    let norm = max_hamiltonian_norm(source, t0, t1);
    let span = (t1 - t0).abs();
    if norm > 0.0 {
        (STEP_SAFETY / norm).min(span)
    } else {
        span
    }
}

/// Resolves the RK4 step that `cfg` implies on a window.
pub fn resolved_step<S: HamiltonianSource + ?Sized>(source: &S, t0: f64, t1: f64, cfg: &IntegratorConfig) -> f64 {
    cfg.step.unwrap_or_else(|| auto_step(source, t0, t1))
}

#[derive(Debug, Clone)]
pub struct DensityTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// Free-form scenario descriptor; trajectories with different labels are
    /// never compared.
    pub label: String,
    /// Internal step actually used (RK4) or the initial step (RK45).
    pub step: f64,
}

impl DensityTrajectory {
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn final_state(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory has at least two states")
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub step: f64,
}

impl StateTrajectory {
    /// ψψ† at every stored time.
    pub fn to_density(&self) -> DensityTrajectory {
        DensityTrajectory {
            times: self.times.clone(),
            states: self.states.iter().map(|psi| DensityMatrix::from_raw(CMatrix::outer(psi))).collect(),
            label: String::new(),
            step: self.step,
        }
    }
}

#[derive(Clone, Copy)]
enum Equation {
    Liouville,
    Schrodinger,
}

struct Engine<'a, S: ?Sized> {
    source: &'a S,
    equation: Equation,
    dim: usize,
}

impl<S: HamiltonianSource + ?Sized> Engine<'_, S> {
    fn rhs(&self, y: &[C64], h: &[C64], out: &mut [C64]) {
        match self.equation {
            Equation::Liouville => liouville_rhs(y, h, self.dim, out),
            Equation::Schrodinger => schrodinger_rhs(y, h, self.dim, out),
        }
    }

    /// Advances `y` from `a` to `b` with `n` equal RK4 steps.
    fn rk4_interval(&self, y: &mut [C64], a: f64, b: f64, n: usize, scratch: &mut Rk4Scratch) {
        let h = (b - a) / n as f64;
        let len = y.len();
        self.source.fill(a, &mut scratch.h_start);
        for j in 0..n {
            let t = a + j as f64 * h;
            let t_end = if j + 1 == n { b } else { a + (j + 1) as f64 * h };
            self.source.fill(t + 0.5 * h, &mut scratch.h_mid);
            self.source.fill(t_end, &mut scratch.h_end);

            self.rhs(y, &scratch.h_start, &mut scratch.k1);
            for i in 0..len {
                scratch.tmp[i] = y[i] + scratch.k1[i] * (0.5 * h);
            }
            self.rhs(&scratch.tmp, &scratch.h_mid, &mut scratch.k2);
            for i in 0..len {
                scratch.tmp[i] = y[i] + scratch.k2[i] * (0.5 * h);
            }
            self.rhs(&scratch.tmp, &scratch.h_mid, &mut scratch.k3);
            for i in 0..len {
                scratch.tmp[i] = y[i] + scratch.k3[i] * h;
            }
            self.rhs(&scratch.tmp, &scratch.h_end, &mut scratch.k4);
            for i in 0..len {
                y[i] += (scratch.k1[i] + (scratch.k2[i] + scratch.k3[i]) * 2.0 + scratch.k4[i]) * (h / 6.0);
            }
            std::mem::swap(&mut scratch.h_start, &mut scratch.h_end);
        }
    }

    /// Advances `y` from `a` to `b` with Dormand–Prince 5(4), carrying the
    /// step estimate across calls.
    fn rk45_interval(&self, y: &mut [C64], a: f64, b: f64, tol: f64, h_guess: &mut f64, s: &mut Rk45Scratch) -> Result<()> {
        let dir = (b - a).signum();
        let mut t = a;
        let mut h = h_guess.abs().min((b - a).abs()) * dir;
        let len = y.len();
        let mut rejections = 0usize;
        while (b - t) * dir > 0.0 {
            if (t + h - b) * dir > 0.0 {
                h = b - t;
            }
            self.dp_stages(y, t, h, s);
            let mut err = 0.0_f64;
            for i in 0..len {
                let e: C64 = (0..7).map(|st| s.k[st][i] * DP_E[st]).sum::<C64>() * h;
                err = err.max(e.norm());
            }
            if !err.is_finite() {
                return Err(Error::Integration { time: t, reason: "non-finite error estimate".into() });
            }
            if err <= tol {
                t = if ((t + h) - b).abs() < 1e-15 * b.abs().max(1.0) { b } else { t + h };
                y.copy_from_slice(&s.y5);
                rejections = 0;
            } else {
                rejections += 1;
                if rejections > 60 {
                    return Err(Error::Integration { time: t, reason: "step size underflow".into() });
                }
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * (tol / err).powf(0.2)).clamp(0.2, 5.0) };
            let next = h * factor;
            if (b - t) * dir > 0.0 {
                h = next;
            }
            *h_guess = next.abs();
        }
        Ok(())
    }

    fn dp_stages(&self, y: &[C64], t: f64, h: f64, s: &mut Rk45Scratch) {
        let len = y.len();
        for st in 0..7 {
            for i in 0..len {
                let mut acc = y[i];
                for (prev, &a) in DP_A[st].iter().enumerate().take(st) {
                    if a != 0.0 {
                        acc += s.k[prev][i] * (a * h);
                    }
                }
                s.tmp[i] = acc;
            }
            self.source.fill(t + DP_C[st] * h, &mut s.h);
            self.rhs(&s.tmp, &s.h, &mut s.k[st]);
        }
        // the last stage row equals the fifth-order weights (FSAL)
        s.y5.copy_from_slice(&s.tmp);
    }
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth- minus fourth-order weights.
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct Rk4Scratch {
    h_start: Vec<C64>,
    h_mid: Vec<C64>,
    h_end: Vec<C64>,
    k1: Vec<C64>,
    k2: Vec<C64>,
    k3: Vec<C64>,
    k4: Vec<C64>,
    tmp: Vec<C64>,
}

impl Rk4Scratch {
    fn new(dim: usize, len: usize) -> Self {
        let hm = || vec![ZERO; dim * dim];
        let v = || vec![ZERO; len];
        Self { h_start: hm(), h_mid: hm(), h_end: hm(), k1: v(), k2: v(), k3: v(), k4: v(), tmp: v() }
    }
}

struct Rk45Scratch {
    h: Vec<C64>,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
    y5: Vec<C64>,
}

impl Rk45Scratch {
    fn new(dim: usize, len: usize) -> Self {
        Self { h: vec![ZERO; dim * dim], k: vec![vec![ZERO; len]; 7], tmp: vec![ZERO; len], y5: vec![ZERO; len] }
    }
}

fn uniform_grid(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    let last = samples - 1;
    (0..samples)
        .map(|k| if k == last { t1 } else { t0 + (t1 - t0) * k as f64 / last as f64 })
        .collect()
}

/// Runs the engine over `grid`, calling `store` with the state at every grid
/// point (including the first). Returns the base step used.
fn integrate<S: HamiltonianSource + ?Sized>(
    source: &S,
    equation: Equation,
    y: &mut [C64],
    grid: &[f64],
    cfg: &IntegratorConfig,
    mut store: impl FnMut(&[C64]),
) -> Result<f64> {
    cfg.validate()?;
    let dim = source.dim();
    let engine = Engine { source, equation, dim };
    let (t0, t1) = (grid[0], *grid.last().expect("non-empty grid"));
    let step = resolved_step(source, t0, t1, cfg);
    store(y);
    match cfg.method {
        Method::Rk4 => {
            let mut scratch = Rk4Scratch::new(dim, y.len());
            for w in grid.windows(2) {
                let (a, b) = (w[0], w[1]);
                let n = ((b - a).abs() / step).ceil().max(1.0) as usize;
                engine.rk4_interval(y, a, b, n, &mut scratch);
                check_finite(y, b)?;
                store(y);
            }
        }
        Method::Rk45 => {
            let mut scratch = Rk45Scratch::new(dim, y.len());
            let mut h_guess = step;
            for w in grid.windows(2) {
                engine.rk45_interval(y, w[0], w[1], cfg.tolerance, &mut h_guess, &mut scratch)?;
                check_finite(y, w[1])?;
                store(y);
            }
        }
    }
    Ok(step)
}

fn check_finite(y: &[C64], t: f64) -> Result<()> {
    if y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Integration { time: t, reason: "state became non-finite".into() })
    }
}

fn check_window(t0: f64, t1: f64) -> Result<()> {
    if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidParameter(format!("window requires t0 < t1, got [{t0}, {t1}]")));
    }
    Ok(())
}

/// Integrates ρ over `[t0, t1]`, storing `cfg.samples` uniformly spaced states.
pub fn evolve_density<S: HamiltonianSource + ?Sized>(
    source: &S,
    rho0: &DensityMatrix,
    (t0, t1): (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<DensityTrajectory> {
    check_window(t0, t1)?;
    if rho0.dim() != source.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has dimension {}, Hamiltonian {}",
            rho0.dim(),
            source.dim()
        )));
    }
    let dim = source.dim();
    let grid = uniform_grid(t0, t1, cfg.samples.max(2));
    let mut y = rho0.matrix().as_slice().to_vec();
    let mut states = Vec::with_capacity(grid.len());
    let step = integrate(source, Equation::Liouville, &mut y, &grid, cfg, |y| {
        let mut m = CMatrix::zeros(dim);
        m.as_mut_slice().copy_from_slice(y);
        states.push(DensityMatrix::from_raw(m));
    })?;
    Ok(DensityTrajectory { times: grid, states, label: String::new(), step })
}

/// Integrates ψ over `[t0, t1]` with the same grid conventions as
/// [`evolve_density`].
pub fn evolve_statevector<S: HamiltonianSource + ?Sized>(
    source: &S,
    psi0: &[C64],
    (t0, t1): (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<StateTrajectory> {
    check_window(t0, t1)?;
    if psi0.len() != source.dim() {
        return Err(Error::DimensionMismatch(format!(
            "initial state has dimension {}, Hamiltonian {}",
            psi0.len(),
            source.dim()
        )));
    }
    let n = norm_sqr(psi0);
    if (n - 1.0).abs() > DENSITY_TOLERANCE {
        return Err(Error::InvalidParameter(format!("initial state norm² {n} != 1")));
    }
    let grid = uniform_grid(t0, t1, cfg.samples.max(2));
    let mut y = psi0.to_vec();
    let mut states = Vec::with_capacity(grid.len());
    let step = integrate(source, Equation::Schrodinger, &mut y, &grid, cfg, |y| states.push(y.to_vec()))?;
    Ok(StateTrajectory { times: grid, states, step })
}

/// Final ρ after integrating from `t_from` to `t_to`; either direction is
/// allowed, so a forward run followed by the reverse run undoes it.
pub fn propagate_density<S: HamiltonianSource + ?Sized>(
    source: &S,
    rho: &DensityMatrix,
    t_from: f64,
    t_to: f64,
    cfg: &IntegratorConfig,
) -> Result<DensityMatrix> {
    let grid = uniform_grid(t_from, t_to, cfg.samples.max(2));
    let mut y = rho.matrix().as_slice().to_vec();
    integrate(source, Equation::Liouville, &mut y, &grid, cfg, |_| {})?;
    let mut m = CMatrix::zeros(rho.dim());
    m.as_mut_slice().copy_from_slice(&y);
    Ok(DensityMatrix::from_raw(m))
}

/// max over stored times and levels of |P_i^(h) − P_i^(h/2)|.
pub fn convergence_check(coarse: &DensityTrajectory, fine: &DensityTrajectory) -> Result<f64> {
    if coarse.label != fine.label {
        return Err(Error::MismatchedScenarios(format!("'{}' vs '{}'", coarse.label, fine.label)));
    }
    if coarse.times != fine.times || coarse.dim() != fine.dim() {
        return Err(Error::MismatchedScenarios("time grids or dimensions differ".into()));
    }
    let mut worst = 0.0_f64;
    for (a, b) in coarse.states.iter().zip(&fine.states) {
        for (pa, pb) in a.populations().iter().zip(b.populations()) {
            worst = worst.max((pa - pb).abs());
        }
    }
    Ok(worst)
}

/// Runs the scenario at its resolved step and at half that step and
/// returns the [`convergence_check`] deviation.
pub fn step_halving_deviation<S: HamiltonianSource + ?Sized>(
    source: &S,
    rho0: &DensityMatrix,
    window: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let h = resolved_step(source, window.0, window.1, cfg);
    let coarse = evolve_density(source, rho0, window, &cfg.with_step(h))?;
    let fine = evolve_density(source, rho0, window, &cfg.with_step(0.5 * h))?;
    convergence_check(&coarse, &fine)
}

/// Worst-case invariant drift along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityDiagnostics {
    pub trace_drift: f64,
    pub hermiticity_drift: f64,
    pub purity_drift: f64,
}

pub fn diagnostics(traj: &DensityTrajectory) -> DensityDiagnostics {
    let mut d = DensityDiagnostics { trace_drift: 0.0, hermiticity_drift: 0.0, purity_drift: 0.0 };
    for rho in &traj.states {
        d.trace_drift = d.trace_drift.max((rho.trace() - C64::new(1.0, 0.0)).norm());
        d.hermiticity_drift = d.hermiticity_drift.max(rho.matrix().hermiticity_deviation());
        d.purity_drift = d.purity_drift.max((rho.purity() - 1.0).abs());
    }
    d
}

/// max elementwise |ρ − ψψ†| over the shared grid.
pub fn propagator_agreement(density: &DensityTrajectory, states: &StateTrajectory) -> Result<f64> {
    if density.times != states.times {
        return Err(Error::MismatchedScenarios("time grids differ".into()));
    }
    Ok(density
        .states
        .iter()
        .zip(&states.states)
        .map(|(rho, psi)| rho.matrix().max_abs_diff(&CMatrix::outer(psi)))
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum_system::{zero_hamiltonian, FnHamiltonian};
    use std::f64::consts::PI;

    /// Resonant constant coupling: H = [[0, w], [w, 0]].
    fn rabi(w: f64) -> FnHamiltonian<impl Fn(f64, &mut [C64]) + Sync> {
        FnHamiltonian::new(2, move |_, out: &mut [C64]| {
            out.copy_from_slice(&[ZERO, C64::new(w, 0.0), C64::new(w, 0.0), ZERO]);
        })
    }

    fn excited_after(area: f64, method: Method) -> f64 {
        // population transfer for constant H = [[0, w], [w, 0]] is sin²(w·T);
        // the pulse area ∫2w dt equals 2wT
        let w = 0.5;
        let t = area / (2.0 * w);
        let cfg = IntegratorConfig { method, samples: 50, ..Default::default() };
        let traj = evolve_density(&rabi(w), &DensityMatrix::ground(2), (0.0, t), &cfg).unwrap();
        traj.final_state().populations()[1]
    }

    #[test]
    fn zero_hamiltonian_freezes_state() {
        let psi = [C64::new(0.6, 0.0), C64::new(0.0, 0.8)];
        let rho0 = DensityMatrix::pure(&psi).unwrap();
        let traj = evolve_density(&zero_hamiltonian(2), &rho0, (0.0, 10.0), &IntegratorConfig::default()).unwrap();
        assert!(traj.states.iter().all(|r| r == &rho0));
        let sv = evolve_statevector(&zero_hamiltonian(2), &psi, (0.0, 10.0), &IntegratorConfig::default()).unwrap();
        assert!(sv.states.iter().all(|s| s.as_slice() == psi));
    }

    #[test]
    fn rabi_oracle_rk4_and_rk45() {
        for method in [Method::Rk4, Method::Rk45] {
            assert!((excited_after(PI, method) - 1.0).abs() < 1e-8, "{method:?}");
            assert!(excited_after(2.0 * PI, method).abs() < 1e-8, "{method:?}");
            let p = excited_after(1.3, method);
            assert!((p - (1.3f64 / 2.0).sin().powi(2)).abs() < 1e-8, "{method:?}");
        }
    }

    #[test]
    fn state_vector_pi_pulse() {
        let w = 0.25;
        let sv = evolve_statevector(
            &rabi(w),
            &[C64::new(1.0, 0.0), ZERO],
            (0.0, PI / (2.0 * w)),
            &IntegratorConfig::default(),
        )
        .unwrap();
        let last = sv.states.last().unwrap();
        assert!((last[1].norm_sqr() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_and_state_vector_agree() {
        let source = FnHamiltonian::new(3, |t: f64, out: &mut [C64]| {
            let w = 0.3 * (-(t - 5.0).powi(2) / 8.0).exp();
            out.copy_from_slice(&[
                ZERO, C64::new(w, 0.0), ZERO,
                C64::new(w, 0.0), C64::new(0.05 * t - 0.2, 0.0), C64::new(0.1, 0.0),
                ZERO, C64::new(0.1, 0.0), C64::new(0.3, 0.0),
            ]);
        });
        let psi0 = [C64::new(1.0, 0.0), ZERO, ZERO];
        let cfg = IntegratorConfig::default().with_samples(200);
        let rho = evolve_density(&source, &DensityMatrix::pure(&psi0).unwrap(), (0.0, 10.0), &cfg).unwrap();
        let sv = evolve_statevector(&source, &psi0, (0.0, 10.0), &cfg).unwrap();
        assert!(propagator_agreement(&rho, &sv).unwrap() < 1e-8);
        let d = diagnostics(&rho);
        assert!(d.trace_drift < 1e-9 && d.hermiticity_drift < 1e-9 && d.purity_drift < 1e-8);
    }

    #[test]
    fn forward_then_backward_returns_to_start() {
        let source = FnHamiltonian::new(2, |t: f64, out: &mut [C64]| {
            let w = 0.4 * (-(t * t) / 20.0).exp();
            out.copy_from_slice(&[ZERO, C64::new(w, 0.0), C64::new(w, 0.0), C64::new(0.1 * t, 0.0)]);
        });
        let rho0 = DensityMatrix::ground(2);
        let cfg = IntegratorConfig::default().with_samples(100);
        let fwd = propagate_density(&source, &rho0, -15.0, 15.0, &cfg).unwrap();
        assert!(fwd.populations()[1] > 0.1);
        let back = propagate_density(&source, &fwd, 15.0, -15.0, &cfg).unwrap();
        assert!(back.matrix().max_abs_diff(rho0.matrix()) < 1e-7);
    }

    #[test]
    fn convergence_check_examples() {
        let cfg = IntegratorConfig::default().with_samples(20);
        let a = evolve_density(&rabi(0.4), &DensityMatrix::ground(2), (0.0, 3.0), &cfg).unwrap();
        assert_eq!(convergence_check(&a, &a).unwrap(), 0.0);
        let z = DensityMatrix::ground(2);
        let d = step_halving_deviation(&zero_hamiltonian(2), &z, (0.0, 3.0), &cfg.with_step(0.1)).unwrap();
        assert_eq!(d, 0.0);
        let b = a.clone().with_label("other");
        assert!(convergence_check(&a, &b).is_err());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let bad = CMatrix::from_real_rows(&[vec![0.5, 0.0], vec![0.0, 0.6]]);
        assert!(DensityMatrix::new(bad).is_err());
        let neg = CMatrix::from_real_rows(&[vec![1.5, 0.0], vec![0.0, -0.5]]);
        assert!(DensityMatrix::new(neg).is_err());
        assert!(DensityMatrix::new(CMatrix::from_real_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]])).is_ok());
        let cfg = IntegratorConfig::default().with_step(-1.0);
        assert!(evolve_density(&rabi(0.1), &DensityMatrix::ground(2), (0.0, 1.0), &cfg).is_err());
        let rho3 = DensityMatrix::ground(3);
        assert!(evolve_density(&rabi(0.1), &rho3, (0.0, 1.0), &IntegratorConfig::default()).is_err());
        assert!(evolve_density(&rabi(0.1), &DensityMatrix::ground(2), (1.0, 0.0), &IntegratorConfig::default()).is_err());
    }

    #[test]
    fn nan_hamiltonian_reports_time() {
        let src = FnHamiltonian::new(2, |t: f64, out: &mut [C64]| {
            let v = if t > 0.5 { f64::NAN } else { 0.1 };
            out.copy_from_slice(&[ZERO, C64::new(v, 0.0), C64::new(v, 0.0), ZERO]);
        });
        let cfg = IntegratorConfig::default().with_step(0.01).with_samples(11);
        match evolve_density(&src, &DensityMatrix::ground(2), (0.0, 1.0), &cfg) {
            Err(Error::Integration { time, .. }) => assert!((time - 0.6).abs() < 1e-12),
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn auto_step_follows_norm() {
        // max |H_ij| = 2, M = 2
        let h = auto_step(&rabi(2.0), 0.0, 100.0);
        assert!((h - 1.0 / 200.0).abs() < 1e-15);
        assert_eq!(auto_step(&zero_hamiltonian(2), 0.0, 7.0), 7.0);
    }
}
