//! Minimal dense complex square matrices sized for small level systems.
//!
//! The propagators run millions of steps on matrices of dimension 2 to ~16,
//! so the hot operations here write into caller-provided buffers.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Row-major dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| C64::new(rows[i][j], 0.0))
    }

    /// |ψ⟩⟨ψ|
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), |i, j| psi[i] * psi[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn fill_zero(&mut self) {
        self.data.iter_mut().for_each(|z| *z = ZERO);
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal_re(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }

    /// max |A_ij − conj(A_ji)|
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// max |A_ij − B_ij|
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

/// out = i·(ρH − Hρ), the Liouville–von Neumann right-hand side with ħ = 1.
pub fn liouville_rhs(rho: &[C64], h: &[C64], dim: usize, out: &mut [C64]) {
    // fixed sizes let the compiler unroll the inner products; a real H (the
    // usual case in the FM frame) halves the multiplications
    let real = h.iter().all(|z| z.im == 0.0);
    match (dim, real) {
        (2, true) => commutator_real::<2>(rho, h, out),
        (3, true) => commutator_real::<3>(rho, h, out),
        (4, true) => commutator_real::<4>(rho, h, out),
        (5, true) => commutator_real::<5>(rho, h, out),
        (6, true) => commutator_real::<6>(rho, h, out),
        (2, false) => commutator::<2>(rho, h, out),
        (3, false) => commutator::<3>(rho, h, out),
        (4, false) => commutator::<4>(rho, h, out),
        (5, false) => commutator::<5>(rho, h, out),
        (6, false) => commutator::<6>(rho, h, out),
        _ => commutator_dyn(rho, h, dim, out),
    }
}

fn commutator<const D: usize>(rho: &[C64], h: &[C64], out: &mut [C64]) {
    let (rho, h, out) = (&rho[..D * D], &h[..D * D], &mut out[..D * D]);
    for i in 0..D {
        for j in 0..D {
            let mut acc = ZERO;
            for k in 0..D {
                acc += rho[i * D + k] * h[k * D + j] - h[i * D + k] * rho[k * D + j];
            }
            out[i * D + j] = I * acc;
        }
    }
}

fn commutator_real<const D: usize>(rho: &[C64], h: &[C64], out: &mut [C64]) {
    let (rho, out) = (&rho[..D * D], &mut out[..D * D]);
    let mut hr = [[0.0; D]; D];
    for (i, row) in hr.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = h[i * D + j].re;
        }
    }
    for i in 0..D {
        for j in 0..D {
            let (mut re, mut im) = (0.0, 0.0);
            for k in 0..D {
                let a = rho[i * D + k];
                let b = rho[k * D + j];
                re += a.re * hr[k][j] - hr[i][k] * b.re;
                im += a.im * hr[k][j] - hr[i][k] * b.im;
            }
            // i·(re + i·im)
            out[i * D + j] = C64::new(-im, re);
        }
    }
}

fn commutator_dyn(rho: &[C64], h: &[C64], dim: usize, out: &mut [C64]) {
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = ZERO;
            for k in 0..dim {
                acc += rho[i * dim + k] * h[k * dim + j] - h[i * dim + k] * rho[k * dim + j];
            }
            out[i * dim + j] = I * acc;
        }
    }
}

/// out = −i·Hψ, the Schrödinger right-hand side with ħ = 1.
pub fn schrodinger_rhs(psi: &[C64], h: &[C64], dim: usize, out: &mut [C64]) {
    for i in 0..dim {
        let mut acc = ZERO;
        for k in 0..dim {
            acc += h[i * dim + k] * psi[k];
        }
        out[i] = -I * acc;
    }
}

/// ⟨a|b⟩
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}
