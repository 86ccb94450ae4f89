//! Exact two-point-measurement statistics of the two-qubit engine.
//!
//! The space is four-dimensional, so all sixteen initial/final basis pairs
//! are enumerated without truncation.

use std::collections::BTreeMap;

use nalgebra::Matrix4;
use num_complex::Complex64;

use super::FockOracleResult;
use crate::qubit::QubitEngineParams;

/// Partial swap in the basis `|00>, |01>, |10>, |11>` (first label: qubit a).
pub fn two_qubit_unitary(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    Matrix4::new(
        1.0, 0.0, 0.0, 0.0, //
        0.0, c, s, 0.0, //
        0.0, -s, c, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// Joint law of the excitation changes `(dm, dn)` of qubits a and b.
///
/// Level `|1>` sits `omega` above `|0>` and is populated with the Fermi
/// occupation, so `dE_a = omega_a dm` exactly as for the bosonic modes.
pub fn qubit_joint_distribution(params: &QubitEngineParams) -> FockOracleResult {
    let occ = params.occupations();
    let u = two_qubit_unitary(params.0.theta);
    let level = |k: usize| -> (i64, i64) { ((k >> 1) as i64, (k & 1) as i64) };
    let weight = |x: i64, n: f64| if x == 1 { n } else { 1.0 - n };
    let mut joint = BTreeMap::new();
    for j in 0..4 {
        let (a0, b0) = level(j);
        let w = weight(a0, occ.n_a) * weight(b0, occ.n_b);
        for i in 0..4 {
            let p = w * u[(i, j)] * u[(i, j)];
            if p == 0.0 {
                continue;
            }
            let (a1, b1) = level(i);
            *joint.entry((a1 - a0, b1 - b0)).or_insert(0.0) += p;
        }
    }
    FockOracleResult {
        joint,
        omega_a: params.0.omega_a,
        omega_b: params.0.omega_b,
        tail_bound: 0.0,
        leakage: 0.0,
    }
}

pub fn qubit_char_fn_oracle(params: &QubitEngineParams, lambda: Complex64, mu: Complex64) -> Complex64 {
    qubit_joint_distribution(params).char_fn(lambda, mu)
}
