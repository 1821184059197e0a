use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Gate-selection training mechanism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Softmax over 16 gate logits, forward is the mixture `pi^T G`.
    SoftMix,
    /// 16 logits, one Gumbel-max gate per neuron per minibatch, straight-through backward.
    GumbelSt,
    /// 4 coefficients, hard snap forward, straight-through backward.
    MultilinearSte,
    /// 4 coefficients, soft vector quantization forward, covariance Jacobian backward.
    MultilinearCovJac,
    /// 4 corner values through a logistic, exact gradients.
    IwpFree,
    /// 4 corner values rounded to {0,1}, corner-basis straight-through backward.
    IwpSte,
    /// 4 raw coefficients, `z = logistic(c^T psi)`, exact gradients.
    MultilinearFree,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::SoftMix,
        Method::GumbelSt,
        Method::MultilinearSte,
        Method::MultilinearCovJac,
        Method::IwpFree,
        Method::IwpSte,
        Method::MultilinearFree,
    ];

    pub fn params_per_neuron(self) -> usize {
        match self {
            Method::SoftMix | Method::GumbelSt => 16,
            _ => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::SoftMix => "soft_mix",
            Method::GumbelSt => "gumbel_st",
            Method::MultilinearSte => "multilinear_ste",
            Method::MultilinearCovJac => "multilinear_covjac",
            Method::IwpFree => "iwp_free",
            Method::IwpSte => "iwp_ste",
            Method::MultilinearFree => "multilinear_free",
        }
    }

    /// Methods parameterized by 16 gate logits.
    pub fn has_logit_params(self) -> bool {
        self.params_per_neuron() == 16
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let m = match s {
            "soft_mix" | "softmix" => Method::SoftMix,
            "gumbel_st" | "gumbel" => Method::GumbelSt,
            "multilinear_ste" | "ste" => Method::MultilinearSte,
            "multilinear_covjac" | "covjac" => Method::MultilinearCovJac,
            "iwp_free" => Method::IwpFree,
            "iwp_ste" => Method::IwpSte,
            "multilinear_free" => Method::MultilinearFree,
            _ => {
                return Err(Error::UnknownVariant {
                    kind: "method",
                    value: s.to_string(),
                })
            }
        };
        Ok(m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WiringScheme {
    #[default]
    Stride,
    Random,
}

impl WiringScheme {
    pub fn name(self) -> &'static str {
        match self {
            WiringScheme::Stride => "stride",
            WiringScheme::Random => "random",
        }
    }
}

impl FromStr for WiringScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stride" => Ok(WiringScheme::Stride),
            "random" => Ok(WiringScheme::Random),
            _ => Err(Error::UnknownVariant {
                kind: "wiring scheme",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetworkConfig {
    pub input_dim: usize,
    pub depth: usize,
    pub width: usize,
    pub classes: usize,
    pub method: Method,
    pub tau: f64,
    pub init_sigma: f64,
    /// Seed of the random wiring scheme. Stride wiring ignores it.
    pub seed: u64,
    pub wiring_scheme: WiringScheme,
}

impl NetworkConfig {
    pub fn new(input_dim: usize, depth: usize, width: usize, classes: usize, method: Method) -> Self {
        NetworkConfig {
            input_dim,
            depth,
            width,
            classes,
            method,
            tau: 1.0,
            init_sigma: 1.0,
            seed: 0,
            wiring_scheme: WiringScheme::Stride,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.depth < 1 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        if self.classes < 1 {
            return Err(Error::Config("class count must be at least 1".into()));
        }
        if self.width == 0 || self.width % self.classes != 0 {
            return Err(Error::Config(format!(
                "width {} is not divisible by class count {}",
                self.width, self.classes
            )));
        }
        if self.input_dim < 2 {
            return Err(Error::Config("input_dim must be at least 2".into()));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.init_sigma > 0.0 && self.init_sigma.is_finite()) {
            return Err(Error::Config(format!(
                "init_sigma must be positive, got {}",
                self.init_sigma
            )));
        }
        Ok(())
    }

    pub fn params_per_layer(&self) -> usize {
        self.width * self.method.params_per_neuron()
    }

    pub fn num_params(&self) -> usize {
        self.depth * self.params_per_layer()
    }

    pub fn source_width(&self, layer: usize) -> usize {
        if layer == 0 {
            self.input_dim
        } else {
            self.width
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut c = NetworkConfig::new(17, 6, 136, 2, Method::MultilinearCovJac);
        assert!(c.validate().is_ok());
        c.width = 135;
        assert!(c.validate().is_err());
        c.width = 136;
        c.tau = 0.0;
        assert!(c.validate().is_err());
        c.tau = 1.0;
        c.depth = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("softmax".parse::<Method>().is_err());
    }
}
