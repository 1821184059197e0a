//! Multilinear-CovJac: soft vector quantization against the codebook, with the
//! analytic covariance Jacobian in place of the straight-through identity.

use super::softmix::{mix_coeffs, softmax, Weights};
use crate::codebook::{psi, CODEBOOK, NUM_GATES};

pub type Mat4 = [[f64; 4]; 4];

/// `omega = softmax(-|c - G_j|^2 / tau)` and `c_soft = omega^T G`.
pub fn covjac_effective(c: &[f64; 4], tau: f64) -> (Weights, [f64; 4]) {
    let mut neg = [0.0; NUM_GATES];
    for (n, row) in neg.iter_mut().zip(CODEBOOK.iter()) {
        let d2: f64 = (0..4).map(|k| (c[k] - row[k] as f64).powi(2)).sum();
        *n = -d2 / tau;
    }
    let omega = softmax(&neg);
    let soft = mix_coeffs(&omega);
    (omega, soft)
}

/// `J = (2 / tau) Cov_omega(G)`.
pub fn covjac_jacobian(omega: &Weights, tau: f64) -> Mat4 {
    let mean = mix_coeffs(omega);
    let mut j = [[0.0; 4]; 4];
    for (w, row) in omega.iter().zip(CODEBOOK.iter()) {
        for p in 0..4 {
            let dp = row[p] as f64 - mean[p];
            for q in 0..4 {
                j[p][q] += w * dp * (row[q] as f64 - mean[q]);
            }
        }
    }
    let s = 2.0 / tau;
    for r in &mut j {
        for x in r {
            *x *= s;
        }
    }
    j
}

#[inline]
pub fn mat_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|p| (0..4).map(|q| m[p][q] * v[q]).sum())
}

/// Single-sample backward: `J (delta psi)` and `delta * (dz/da, dz/db)` under `c_soft`.
pub fn covjac_backward(
    jac: &Mat4,
    c_soft: &[f64; 4],
    a: f64,
    b: f64,
    delta: f64,
) -> ([f64; 4], (f64, f64)) {
    let g = psi(a, b).map(|x| delta * x);
    (
        mat_vec(jac, &g),
        (delta * (c_soft[1] + c_soft[3] * b), delta * (c_soft[2] + c_soft[3] * a)),
    )
}
