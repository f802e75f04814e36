//! Dressed states: instantaneous eigensystems of H^FM(t), with eigenvector
//! continuity tracking so eigen-energy curves can be followed through
//! avoided crossings.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{HamiltonianSnapshot, HamiltonianSource};
use crate::error::{Error, Result};
use crate::linalg::{inner, C64};

const HERMITIAN_TOLERANCE: f64 = 1e-10;
const OVERLAP_TIE: f64 = 1e-12;

/// Eigenvalues with their eigenvectors; `vectors[k]` belongs to `values[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

impl EigenBasis {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// |⟨self_k|other_l⟩| for all k, l.
    pub fn overlaps(&self, other: &EigenBasis) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|a| other.vectors.iter().map(|b| inner(a, b).norm()).collect())
            .collect()
    }
}

/// Diagonalizes a Hermitian snapshot.
///
/// Without `previous`, eigenpairs come out in ascending eigenvalue order.
/// With `previous`, slot k receives the new eigenvector overlapping most with
/// `previous.vectors[k]` and its phase is rotated so that overlap is real and
/// positive. Overlap ties within 1e-12 fall back to ascending eigenvalue.
pub fn dressed_eigensystem(h: &HamiltonianSnapshot, previous: Option<&EigenBasis>) -> Result<EigenBasis> {
    let deviation = h.matrix.hermiticity_deviation();
    if deviation > HERMITIAN_TOLERANCE * h.matrix.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let n = h.matrix.dim();
    // symmetrize, then hand the Hermitian eigenproblem to nalgebra
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (h.matrix[(i, j)] + h.matrix[(j, i)].conj()));
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut sorted = EigenBasis {
        values: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        vectors: order
            .iter()
            .map(|&k| {
                let col = eig.eigenvectors.column(k);
                normalize_phase(col.iter().copied().collect())
            })
            .collect(),
    };

    let Some(prev) = previous else {
        return Ok(sorted);
    };
    if prev.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "previous basis has {} vectors, Hamiltonian has dimension {n}",
            prev.dim()
        )));
    }

    let assignment = greedy_assignment(&prev.overlaps(&sorted));
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for (k, &l) in assignment.iter().enumerate() {
        values.push(sorted.values[l]);
        let mut v = std::mem::take(&mut sorted.vectors[l]);
        let ov = inner(&prev.vectors[k], &v);
        if ov.norm() > 0.0 {
            let phase = ov.conj() / ov.norm();
            v.iter_mut().for_each(|z| *z *= phase);
        }
        vectors.push(v);
    }
    Ok(EigenBasis { values, vectors })
}

/// Largest-magnitude component made real and positive.
fn normalize_phase(mut v: Vec<C64>) -> Vec<C64> {
    let pivot = v
        .iter()
        .copied()
        .fold(C64::new(0.0, 0.0), |best, z| if z.norm() > best.norm() + OVERLAP_TIE { z } else { best });
    if pivot.norm() > 0.0 {
        let phase = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= phase);
    }
    v
}

/// Repeatedly pairs the largest remaining overlap. Returns, for each previous
/// slot k, the index of the new eigenvector assigned to it.
fn greedy_assignment(overlap: &[Vec<f64>]) -> Vec<usize> {
    let n = overlap.len();
    let mut assigned = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    for _ in 0..n {
        let mut best: Option<(usize, usize, f64)> = None;
        for (k, row) in overlap.iter().enumerate() {
            if assigned[k] != usize::MAX {
                continue;
            }
            for (l, &o) in row.iter().enumerate() {
                if taken[l] {
                    continue;
                }
                // strict improvement keeps the lowest (k, l) among ties
                if best.is_none_or(|(_, _, b)| o > b + OVERLAP_TIE) {
                    best = Some((k, l, o));
                }
            }
        }
        let (k, l, _) = best.expect("unassigned slot remains");
        assigned[k] = l;
        taken[l] = true;
    }
    assigned
}

/// Continuity-tracked dressed states sampled on a time grid.
#[derive(Debug, Clone)]
pub struct DressedFrame {
    pub times: Vec<f64>,
    pub bases: Vec<EigenBasis>,
}

impl DressedFrame {
    pub fn eigenvalues(&self) -> impl Iterator<Item = &[f64]> {
        self.bases.iter().map(|b| b.values.as_slice())
    }

    /// Population weight of basis state `level` in dressed state k, per time.
    pub fn character(&self, level: usize) -> Vec<Vec<f64>> {
        self.bases
            .iter()
            .map(|b| b.vectors.iter().map(|v| v[level].norm_sqr()).collect())
            .collect()
    }
}

pub fn dressed_frame<S: HamiltonianSource + ?Sized>(source: &S, times: &[f64]) -> Result<DressedFrame> {
    let mut bases: Vec<EigenBasis> = Vec::with_capacity(times.len());
    for &t in times {
        let basis = dressed_eigensystem(&source.snapshot(t), bases.last())?;
        bases.push(basis);
    }
    Ok(DressedFrame { times: times.to_vec(), bases })
}
