//! Parameter tensor, per-neuron effective coefficients and deployed gates.

use rand_distr::{Distribution, Normal};

use super::covjac::covjac_effective;
use super::iwp::{corner_gate, iwp_free_corners, iwp_ste_corners, sign_gate};
use super::softmix::{softmax, softmix_effective, Weights};
use super::gumbel::argmax;
use crate::codebook::{codebook, corner_to_poly, CoeffVec, CornerVec, GateId, NUM_GATES};
use crate::error::{Error, Result};
use crate::netarch::{Method, NetworkConfig, Wiring};
use crate::rng::{stream, Purpose};

/// A network: configuration, fixed wiring and the layer-major raw parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub config: NetworkConfig,
    pub wiring: Wiring,
    pub params: Vec<f32>,
}

impl Model {
    /// Builds the wiring from `config` and draws every parameter from
    /// `Normal(0, init_sigma^2)` under `init_seed`.
    pub fn init(config: NetworkConfig, init_seed: u64) -> Result<Model> {
        config.validate()?;
        let wiring = Wiring::build(&config)?;
        let normal = Normal::new(0.0, config.init_sigma)
            .map_err(|e| Error::Config(format!("init_sigma: {e}")))?;
        let mut rng = stream(init_seed, Purpose::Init, 0);
        let params = (0..config.num_params())
            .map(|_| normal.sample(&mut rng) as f32)
            .collect();
        Ok(Model { config, wiring, params })
    }

    pub fn from_parts(config: NetworkConfig, wiring: Wiring, params: Vec<f32>) -> Result<Model> {
        config.validate()?;
        if params.len() != config.num_params() {
            return Err(Error::ParamShape {
                method: config.method.name(),
                expected: config.num_params(),
                got: params.len(),
            });
        }
        if wiring.depth() != config.depth
            || wiring.input_dim != config.input_dim
            || wiring.layers.iter().any(|l| l.len() != config.width)
        {
            return Err(Error::Config("wiring does not match network shape".into()));
        }
        wiring.validate()?;
        Ok(Model { config, wiring, params })
    }

    pub fn layer_params(&self, layer: usize) -> &[f32] {
        let n = self.config.params_per_layer();
        &self.params[layer * n..(layer + 1) * n]
    }

    pub fn neuron_params(&self, layer: usize, neuron: usize) -> &[f32] {
        let p = self.config.method.params_per_neuron();
        &self.layer_params(layer)[neuron * p..(neuron + 1) * p]
    }

    pub fn method(&self) -> Method {
        self.config.method
    }

    /// Continuous polynomial coefficients of a neuron, ignoring noise and snapping.
    ///
    /// Logit methods give `softmax(l)^T G`; CovJac gives `c_soft`; corner
    /// methods map their (squashed or rounded) corner values through `M`;
    /// STE and the free multilinear variant return the raw coefficients.
    pub fn soft_coeffs(&self, layer: usize, neuron: usize) -> [f64; 4] {
        let raw = self.neuron_params(layer, neuron);
        match self.method() {
            Method::SoftMix | Method::GumbelSt => softmix_effective(&logits(raw)).1,
            Method::MultilinearCovJac => covjac_effective(&quad(raw), self.config.tau).1,
            Method::IwpFree => corner_to_poly(&CornerVec(iwp_free_corners(&quad(raw)))).0,
            Method::IwpSte => corner_to_poly(&CornerVec(iwp_ste_corners(&quad(raw)))).0,
            Method::MultilinearSte | Method::MultilinearFree => quad(raw),
        }
    }

    /// Gate selection weights: `softmax(l)` for logit methods, otherwise
    /// `softmax(-|c - G_j|^2 / tau)` of [`Model::soft_coeffs`] (the raw
    /// coefficients for CovJac).
    pub fn selection_weights(&self, layer: usize, neuron: usize) -> Weights {
        let raw = self.neuron_params(layer, neuron);
        match self.method() {
            Method::SoftMix | Method::GumbelSt => softmax(&logits(raw)),
            Method::MultilinearCovJac => covjac_effective(&quad(raw), self.config.tau).0,
            _ => covjac_effective(&self.soft_coeffs(layer, neuron), self.config.tau).0,
        }
    }

    /// Deployed gate of a neuron.
    ///
    /// Logit methods take the argmax logit, STE and CovJac snap the raw
    /// coefficients, corner methods round each corner, and the free
    /// multilinear variant thresholds `c^T psi` at zero on each corner
    /// (equivalently its logistic output at 1/2).
    pub fn gate(&self, layer: usize, neuron: usize) -> Result<GateId> {
        let raw = self.neuron_params(layer, neuron);
        Ok(match self.method() {
            Method::SoftMix | Method::GumbelSt => argmax(&logits(raw)),
            Method::MultilinearSte | Method::MultilinearCovJac => codebook().snap(&CoeffVec(quad(raw)))?.0,
            Method::IwpFree | Method::IwpSte => corner_gate(&quad(raw)),
            Method::MultilinearFree => sign_gate(&quad(raw)),
        })
    }

    pub fn gates(&self) -> Result<Vec<Vec<GateId>>> {
        (0..self.config.depth)
            .map(|l| (0..self.config.width).map(|n| self.gate(l, n)).collect())
            .collect()
    }
}

pub(crate) fn quad(raw: &[f32]) -> [f64; 4] {
    std::array::from_fn(|i| raw[i] as f64)
}

pub(crate) fn logits(raw: &[f32]) -> Weights {
    let mut l = [0.0; NUM_GATES];
    for (o, &r) in l.iter_mut().zip(raw) {
        *o = r as f64;
    }
    l
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn init_is_seeded_and_shaped() {
        let cfg = NetworkConfig::new(8, 2, 6, 2, Method::SoftMix);
        let a = Model::init(cfg.clone(), 4).unwrap();
        let b = Model::init(cfg.clone(), 4).unwrap();
        let c = Model::init(cfg, 5).unwrap();
        assert_eq!(a.params.len(), 2 * 6 * 16);
        assert_eq!(a, b);
        assert_ne!(a.params, c.params);
    }

    #[test]
    fn init_moments() {
        let mut cfg = NetworkConfig::new(8, 4, 1000, 2, Method::MultilinearSte);
        cfg.init_sigma = 0.5;
        let m = Model::init(cfg, 1).unwrap();
        let n = m.params.len() as f64;
        let mean = m.params.iter().map(|&x| x as f64).sum::<f64>() / n;
        let var = m.params.iter().map(|&x| (x as f64 - mean).powi(2)).sum::<f64>() / n;
        assert!(mean.abs() < 0.01);
        assert!((var - 0.25).abs() < 0.01);
    }

    #[test]
    fn param_shape_checked() {
        let cfg = NetworkConfig::new(4, 1, 2, 2, Method::MultilinearCovJac);
        let w = Wiring::build(&cfg).unwrap();
        assert!(Model::from_parts(cfg.clone(), w.clone(), vec![0.0; 7]).is_err());
        assert!(Model::from_parts(cfg, w, vec![0.0; 8]).is_ok());
    }

    #[test]
    fn deployed_gates() {
        let cfg = NetworkConfig::new(4, 1, 2, 2, Method::MultilinearSte);
        let w = Wiring::build(&cfg).unwrap();
        let m = Model::from_parts(cfg, w, vec![0.0, 0.0, 0.0, 1.0, 0.1, 0.9, 0.8, -0.7]).unwrap();
        assert_eq!(m.gates().unwrap(), vec![vec![GateId::AND, GateId::OR]]);
    }
}
