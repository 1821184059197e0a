//! Soft-Mix: a softmax mixture over all 16 gates.

use crate::codebook::{psi, CODEBOOK, NUM_GATES};

pub type Weights = [f64; NUM_GATES];

/// Max-subtracted softmax.
pub fn softmax(logits: &Weights) -> Weights {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; NUM_GATES];
    let mut sum = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - m).exp();
        sum += *o;
    }
    for o in &mut out {
        *o /= sum;
    }
    out
}

/// `pi^T G`.
pub fn mix_coeffs(weights: &Weights) -> [f64; 4] {
    let mut c = [0.0; 4];
    for (w, row) in weights.iter().zip(CODEBOOK.iter()) {
        for k in 0..4 {
            c[k] += w * row[k] as f64;
        }
    }
    c
}

pub fn softmix_effective(logits: &Weights) -> (Weights, [f64; 4]) {
    let pi = softmax(logits);
    let c = mix_coeffs(&pi);
    (pi, c)
}

/// Pulls a gradient on the mixed coefficients back to the logits through
/// `c = softmax(l)^T G`.
pub fn logit_grad(pi: &Weights, coeff_grad: &[f64; 4]) -> Weights {
    let mut gpi = [0.0; NUM_GATES];
    for (g, row) in gpi.iter_mut().zip(CODEBOOK.iter()) {
        *g = (0..4).map(|k| row[k] as f64 * coeff_grad[k]).sum();
    }
    let mean: f64 = pi.iter().zip(&gpi).map(|(p, g)| p * g).sum();
    let mut out = [0.0; NUM_GATES];
    for j in 0..NUM_GATES {
        out[j] = pi[j] * (gpi[j] - mean);
    }
    out
}

/// Input gradients `(dz/da, dz/db)` of the mixture at `(a, b)`.
#[inline]
pub fn input_grad(c: &[f64; 4], a: f64, b: f64) -> (f64, f64) {
    (c[1] + c[3] * b, c[2] + c[3] * a)
}

/// Single-sample backward. Returns logit gradients and `(dL/da, dL/db)`.
pub fn softmix_backward(pi: &Weights, a: f64, b: f64, delta: f64) -> (Weights, (f64, f64)) {
    let p = psi(a, b);
    let gc = p.map(|x| delta * x);
    let c = mix_coeffs(pi);
    let (da, db) = input_grad(&c, a, b);
    (logit_grad(pi, &gc), (delta * da, delta * db))
}
