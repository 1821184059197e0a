//! Fixed per-layer input pairs.
//!
//! Stride wiring enumerates pairs `(x_i, x_{i+g})` by increasing gap `g`:
//! for each gap, every pair with an even start `i` (ascending), then every
//! pair with an odd start. For `g = 1` that is `(0,1), (2,3), ...` then
//! `(1,2), (3,4), ...`; for `g = 2` it is `(0,2), (2,4), ...` then
//! `(1,3), (3,5), ...`. After all `w(w-1)/2` pairs are used the enumeration
//! restarts from the beginning.
//!
//! Random wiring draws, per neuron, `in0` uniformly from `0..w` and `in1`
//! uniformly from the remaining `w - 1` indices, using the `Wiring` stream of
//! [`crate::rng`] and 32-bit range sampling.

use rand::Rng;

use super::config::{NetworkConfig, WiringScheme};
use crate::error::{Error, Result};
use crate::rng::{stream, Purpose};

pub type Pair = (u32, u32);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wiring {
    pub input_dim: usize,
    pub layers: Vec<Vec<Pair>>,
}

impl Wiring {
    pub fn build(config: &NetworkConfig) -> Result<Wiring> {
        let layers = (0..config.depth)
            .map(|l| {
                build_wiring(
                    config.source_width(l),
                    config.width,
                    config.wiring_scheme,
                    config.seed.wrapping_add(l as u64),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Wiring {
            input_dim: config.input_dim,
            layers,
        })
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn validate(&self) -> Result<()> {
        let mut src = self.input_dim;
        for layer in &self.layers {
            for &(a, b) in layer {
                if a == b {
                    return Err(Error::Config(format!("wiring pairs index {a} with itself")));
                }
                if a as usize >= src || b as usize >= src {
                    return Err(Error::Dimension {
                        what: "wiring index within source width",
                        expected: src,
                        got: a.max(b) as usize,
                    });
                }
            }
            src = layer.len();
        }
        Ok(())
    }
}

/// Stride pairs over a source of width `w`, in enumeration order, never ending.
pub fn stride_pairs(w: usize) -> impl Iterator<Item = Pair> {
    let once = move || {
        (1..w).flat_map(move |g| {
            (0..2).flat_map(move |parity| {
                (parity..w.saturating_sub(g))
                    .step_by(2)
                    .map(move |i| (i as u32, (i + g) as u32))
            })
        })
    };
    std::iter::repeat(()).flat_map(move |_| once())
}

pub fn build_wiring(source_width: usize, k: usize, scheme: WiringScheme, seed: u64) -> Result<Vec<Pair>> {
    if source_width < 2 {
        return Err(Error::Config(format!(
            "source width must be at least 2, got {source_width}"
        )));
    }
    match scheme {
        WiringScheme::Stride => Ok(stride_pairs(source_width).take(k).collect()),
        WiringScheme::Random => {
            let mut rng = stream(seed, Purpose::Wiring, source_width as u64);
            let w = source_width as u32;
            Ok((0..k)
                .map(|_| {
                    let a = rng.random_range(0..w);
                    let mut b = rng.random_range(0..w - 1);
                    if b >= a {
                        b += 1;
                    }
                    (a, b)
                })
                .collect())
        }
    }
}
