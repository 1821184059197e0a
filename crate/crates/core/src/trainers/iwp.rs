//! Corner-parameterized variants and the unsnapped multilinear variant.

use crate::codebook::{phi, poly_to_corner, psi, CoeffVec, GateId};

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Per-corner logistic squashing, as polynomial coefficients.
pub fn iwp_free_corners(raw: &[f64; 4]) -> [f64; 4] {
    raw.map(sigmoid)
}

/// Per-corner rounding to `{0, 1}`; a corner is on when its raw value is positive.
pub fn iwp_ste_corners(raw: &[f64; 4]) -> [f64; 4] {
    raw.map(|s| if s > 0.0 { 1.0 } else { 0.0 })
}

/// Gate with the given rounded corner pattern.
pub fn corner_gate(raw: &[f64; 4]) -> GateId {
    let mut id = 0u8;
    for (i, &s) in raw.iter().enumerate() {
        if s > 0.0 {
            id |= 1 << i;
        }
    }
    GateId::new(id).expect("4-bit pattern")
}

/// `z = sum_i s_i phi_i(a, b)`.
pub fn iwp_forward(corners: &[f64; 4], a: f64, b: f64) -> f64 {
    let f = phi(a, b);
    (0..4).map(|i| corners[i] * f[i]).sum()
}

/// Exact gradient of the IWP-free forward w.r.t. raw corner parameters.
pub fn iwp_free_backward(raw: &[f64; 4], a: f64, b: f64, delta: f64) -> [f64; 4] {
    let f = phi(a, b);
    std::array::from_fn(|i| {
        let s = sigmoid(raw[i]);
        delta * f[i] * s * (1.0 - s)
    })
}

/// Straight-through corner gradient `delta * phi(a, b)`.
pub fn iwp_ste_backward(a: f64, b: f64, delta: f64) -> [f64; 4] {
    phi(a, b).map(|x| delta * x)
}

/// `z = logistic(c^T psi(a, b))`.
pub fn mfree_forward(c: &[f64; 4], a: f64, b: f64) -> f64 {
    sigmoid(CoeffVec(*c).eval(a, b))
}

/// Exact parameter gradient of the unsnapped logistic multilinear neuron.
pub fn mfree_backward(c: &[f64; 4], a: f64, b: f64, delta: f64) -> [f64; 4] {
    let z = mfree_forward(c, a, b);
    let du = delta * z * (1.0 - z);
    psi(a, b).map(|x| du * x)
}

/// Gate whose truth table is the sign pattern of `c^T psi` at the corners.
pub fn sign_gate(c: &[f64; 4]) -> GateId {
    corner_gate(&poly_to_corner(&CoeffVec(*c)).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iwp_ste_rounds_to_and() {
        let raw = [-3.0, -3.0, -3.0, 3.0];
        assert_eq!(iwp_ste_corners(&raw), [0.0, 0.0, 0.0, 1.0]);
        assert_eq!(corner_gate(&raw), GateId::AND);
    }

    #[test]
    fn iwp_free_top_corner() {
        let raw = [0.3, -1.2, 2.0, 0.7];
        let s = iwp_free_corners(&raw);
        assert_eq!(iwp_forward(&s, 1.0, 1.0), s[3]);
    }

    #[test]
    fn corner_grad_is_one_hot() {
        for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let g = iwp_ste_backward(a, b, 0.7);
            assert_eq!(g.iter().filter(|x| **x != 0.0).count(), 1);
        }
    }

    #[test]
    fn mfree_grad_matches_finite_differences() {
        let c = [0.2, -0.4, 0.9, 0.3];
        let g = mfree_backward(&c, 0.6, 0.2, 1.0);
        for k in 0..4 {
            let mut p = c;
            let mut m = c;
            p[k] += 1e-6;
            m[k] -= 1e-6;
            let fd = (mfree_forward(&p, 0.6, 0.2) - mfree_forward(&m, 0.6, 0.2)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn sign_gate_matches_threshold() {
        assert_eq!(sign_gate(&[-1.0, 0.0, 0.0, 2.0]), GateId::AND);
        assert_eq!(sign_gate(&[-0.5, 1.0, 1.0, -2.0]), GateId::XOR);
    }
}
