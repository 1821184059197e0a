//! Multilinear-STE: snap forward, straight-through backward in a chosen basis.

use super::basis::BasisSpec;
use crate::codebook::{codebook, CoeffVec};
use crate::error::Result;

/// Forward coefficient: the nearest codebook row.
pub fn ste_effective(c: &CoeffVec) -> Result<CoeffVec> {
    Ok(codebook().snap(c)?.1)
}

/// Returns `delta * psi~(a, b)` and `delta * (dz/da, dz/db)` under the snapped
/// coefficients `c_hat`.
pub fn ste_backward(
    c_hat: &CoeffVec,
    basis: BasisSpec,
    a: f64,
    b: f64,
    delta: f64,
) -> ([f64; 4], (f64, f64)) {
    let g = basis.eval(a, b).map(|x| delta * x);
    let c = c_hat.0;
    (g, (delta * (c[1] + c[3] * b), delta * (c[2] + c[3] * a)))
}
