//! Backward bases for the straight-through estimator.
//!
//! Every supported basis is an affine product basis
//! `psi~(a, b) = (1, phi(a), phi(b), phi(a) phi(b))` with `phi(x) = alpha + beta x`.
//! The canonical basis is `alpha = 0, beta = 1`.

use std::fmt;
use std::str::FromStr;

use crate::codebook::psi;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BasisSpec {
    Canonical,
    /// `phi(x) = 2x - 1`.
    Walsh,
    /// `phi(x) = x + eps`.
    Smoothed(f64),
    /// Constant `(1, 0.5, 0.5, 0.25)`.
    ExpectedValue,
    /// Constant `(1, 1, 1, 1)`.
    Uniform,
    Affine { alpha: f64, beta: f64 },
}

impl Default for BasisSpec {
    fn default() -> Self {
        BasisSpec::Canonical
    }
}

impl BasisSpec {
    pub fn alpha_beta(self) -> (f64, f64) {
        match self {
            BasisSpec::Canonical => (0.0, 1.0),
            BasisSpec::Walsh => (-1.0, 2.0),
            BasisSpec::Smoothed(eps) => (eps, 1.0),
            BasisSpec::ExpectedValue => (0.5, 0.0),
            BasisSpec::Uniform => (1.0, 0.0),
            BasisSpec::Affine { alpha, beta } => (alpha, beta),
        }
    }

    #[inline]
    pub fn eval(self, a: f64, b: f64) -> [f64; 4] {
        if self == BasisSpec::Canonical {
            return psi(a, b);
        }
        let (alpha, beta) = self.alpha_beta();
        let pa = alpha + beta * a;
        let pb = alpha + beta * b;
        [1.0, pa, pb, pa * pb]
    }

    pub fn is_degenerate(self) -> bool {
        self.alpha_beta().1 == 0.0
    }
}

impl fmt::Display for BasisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisSpec::Canonical => f.write_str("canonical"),
            BasisSpec::Walsh => f.write_str("walsh"),
            BasisSpec::Smoothed(eps) => write!(f, "smoothed:{eps}"),
            BasisSpec::ExpectedValue => f.write_str("expected_value"),
            BasisSpec::Uniform => f.write_str("uniform"),
            BasisSpec::Affine { alpha, beta } => write!(f, "affine:{alpha}:{beta}"),
        }
    }
}

impl FromStr for BasisSpec {
    type Err = Error;

    /// Accepts `canonical`, `walsh`, `smoothed[:eps]` (default 0.2),
    /// `expected_value`, `uniform` and `affine:<alpha>:<beta>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownVariant {
            kind: "basis",
            value: s.to_string(),
        };
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or("");
        let num = |p: Option<&str>| -> Result<f64> { p.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let spec = match head {
            "canonical" => BasisSpec::Canonical,
            "walsh" => BasisSpec::Walsh,
            "smoothed" => match parts.next() {
                Some(e) => BasisSpec::Smoothed(e.parse().map_err(|_| bad())?),
                None => BasisSpec::Smoothed(0.2),
            },
            "expected_value" => BasisSpec::ExpectedValue,
            "uniform" => BasisSpec::Uniform,
            "affine" => {
                let alpha = num(parts.next())?;
                let beta = num(parts.next())?;
                BasisSpec::Affine { alpha, beta }
            }
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(spec)
    }
}

/// Coverage, coherence and bias of the interaction component of a backward basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BasisMetrics {
    pub coverage: f64,
    pub coherence: f64,
    pub bias: f64,
}

/// Computes `(rho, kappa, B)` over the four equiprobable Boolean corners.
///
/// `B` sums, per coordinate, `min_{d>0} E[(psi~_k - d psi_k)^2]`. The
/// unconstrained minimizer is `d* = E[psi~_k psi_k] / E[psi_k^2]`; when
/// `d* <= 0` the infimum over positive `d` is the `d -> 0` limit `E[psi~_k^2]`.
pub fn basis_metrics(spec: BasisSpec) -> Result<BasisMetrics> {
    if spec.is_degenerate() {
        return Err(Error::DegenerateBasis);
    }
    let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let mut nonzero = 0usize;
    let mut sum3 = 0.0;
    let mut abs3 = 0.0;
    let mut cross = [0.0f64; 4];
    let mut tilde2 = [0.0f64; 4];
    let mut canon2 = [0.0f64; 4];
    for &(a, b) in &corners {
        let t = spec.eval(a, b);
        let c = psi(a, b);
        if t[3] != 0.0 {
            nonzero += 1;
        }
        sum3 += t[3];
        abs3 += t[3].abs();
        for k in 0..4 {
            cross[k] += t[k] * c[k] / 4.0;
            tilde2[k] += t[k] * t[k] / 4.0;
            canon2[k] += c[k] * c[k] / 4.0;
        }
    }
    let bias = (0..4)
        .map(|k| {
            let d = cross[k] / canon2[k];
            if d > 0.0 {
                corners
                    .iter()
                    .map(|&(a, b)| {
                        let e = spec.eval(a, b)[k] - d * psi(a, b)[k];
                        e * e / 4.0
                    })
                    .sum::<f64>()
            } else {
                tilde2[k]
            }
        })
        .sum();
    Ok(BasisMetrics {
        coverage: nonzero as f64 / 4.0,
        coherence: (sum3 / 4.0).abs() / (abs3 / 4.0),
        bias,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_bases() {
        let m = basis_metrics(BasisSpec::Canonical).unwrap();
        assert_eq!((m.coverage, m.coherence, m.bias), (0.25, 1.0, 0.0));

        let m = basis_metrics(BasisSpec::Walsh).unwrap();
        assert_eq!(m.coverage, 1.0);
        assert!(m.coherence.abs() < 1e-12);
        assert!(m.bias > 0.0);

        let m = basis_metrics(BasisSpec::Smoothed(0.2)).unwrap();
        assert_eq!(m.coverage, 1.0);
        assert!((m.coherence - 1.0).abs() < 1e-12);
        assert!(m.bias > 0.0);
    }

    #[test]
    fn degenerate_rejected() {
        assert!(basis_metrics(BasisSpec::Uniform).is_err());
        assert!(basis_metrics(BasisSpec::ExpectedValue).is_err());
        assert!(basis_metrics(BasisSpec::Affine { alpha: 0.3, beta: 0.0 }).is_err());
    }

    #[test]
    fn phi_one_zero_case_is_biased() {
        // phi(x) = alpha (1 - x): rho = 1/4, kappa = 1, but B > 0.
        let m = basis_metrics(BasisSpec::Affine { alpha: 1.0, beta: -1.0 }).unwrap();
        assert_eq!(m.coverage, 0.25);
        assert_eq!(m.coherence, 1.0);
        assert!(m.bias > 0.0);
    }

    #[test]
    fn degenerate_values() {
        assert_eq!(BasisSpec::ExpectedValue.eval(1.0, 0.0), [1.0, 0.5, 0.5, 0.25]);
        assert_eq!(BasisSpec::Uniform.eval(0.0, 1.0), [1.0; 4]);
        assert_eq!(BasisSpec::Walsh.eval(0.0, 1.0), [1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn parse() {
        assert_eq!("walsh".parse::<BasisSpec>().unwrap(), BasisSpec::Walsh);
        assert_eq!("smoothed".parse::<BasisSpec>().unwrap(), BasisSpec::Smoothed(0.2));
        assert_eq!("smoothed:0.1".parse::<BasisSpec>().unwrap(), BasisSpec::Smoothed(0.1));
        assert_eq!(
            "affine:-0.5:1".parse::<BasisSpec>().unwrap(),
            BasisSpec::Affine { alpha: -0.5, beta: 1.0 }
        );
        assert!("affine:1".parse::<BasisSpec>().is_err());
        assert!("hadamard".parse::<BasisSpec>().is_err());
    }
}
