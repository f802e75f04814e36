//! Helpers shared by the integration suites: scenario loading and an
//! independent cyclic-Jacobi eigen solver used as an oracle.

#![allow(dead_code)]

use std::path::PathBuf;

use chirpsim::config::ScenarioConfig;

pub const SCENARIOS: [&str; 5] = [
    "two_level_adiabatic",
    "gate",
    "anthracene_beats",
    "anthracene_locking",
    "anthracene_transparency",
];

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.toml"))
}

pub fn scenario(name: &str) -> ScenarioConfig {
    ScenarioConfig::from_path(scenario_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Anthracene excited block as tabulated in the source literature, GHz.
pub const TABULATED_DETUNINGS_GHZ: [f64; 4] = [3.23, 1.7, 7.57, 3.7];
pub const TABULATED_V_GHZ: [[f64; 4]; 4] = [
    [0.0, -0.28, -4.24, -1.86],
    [-0.28, 0.0, 0.29, 1.82],
    [-4.24, 0.29, 0.0, 0.94],
    [-1.86, 1.82, 0.94, 0.0],
];

pub fn tabulated_excited_block() -> Vec<Vec<f64>> {
    (0..4)
        .map(|i| (0..4).map(|j| if i == j { TABULATED_DETUNINGS_GHZ[i] } else { TABULATED_V_GHZ[i][j] }).collect())
        .collect()
}

/// Eigenvalues (ascending) and column eigenvectors of a real symmetric
/// matrix by cyclic Jacobi rotations.
pub fn jacobi_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vkp, vkq) = (row[p], row[q]);
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (values, vectors)
}

/// All |E_a − E_b| for a < b.
pub fn pair_differences(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for a in 0..values.len() {
        for b in a + 1..values.len() {
            out.push((values[b] - values[a]).abs());
        }
    }
    out
}
