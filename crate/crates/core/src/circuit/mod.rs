//! Deployed Boolean circuits: export, netlist text format and bit-packed evaluation.

mod netlist;
mod packed;

pub use netlist::{read_netlist, write_netlist, parse_netlist, render_netlist};
pub use packed::{eval_packed, write_predictions, PackedBits};

use crate::codebook::GateId;
use crate::error::{Error, Result};
use crate::trainers::Model;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HardGate {
    pub gate: GateId,
    pub in0: u32,
    pub in1: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardCircuit {
    pub input_dim: usize,
    pub classes: usize,
    pub layers: Vec<Vec<HardGate>>,
}

impl HardCircuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn width(&self) -> usize {
        self.layers.first().map_or(0, Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::Config("circuit has no layers".into()));
        }
        let k = self.width();
        if k == 0 {
            return Err(Error::Config("circuit layer is empty".into()));
        }
        if self.classes == 0 || k % self.classes != 0 {
            return Err(Error::Config(format!(
                "width {k} is not divisible by class count {}",
                self.classes
            )));
        }
        let mut src = self.input_dim;
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.len() != k {
                return Err(Error::Config(format!(
                    "layer {l} has {} gates, expected {k}",
                    layer.len()
                )));
            }
            for (n, g) in layer.iter().enumerate() {
                if g.in0 == g.in1 {
                    return Err(Error::Config(format!("gate {l}/{n} reads input {} twice", g.in0)));
                }
                if g.in0 as usize >= src || g.in1 as usize >= src {
                    return Err(Error::Config(format!(
                        "gate {l}/{n} input out of range for source width {src}"
                    )));
                }
            }
            src = k;
        }
        Ok(())
    }

    /// Class for one binary input row, evaluated gate by gate.
    pub fn eval_scalar(&self, row: &[bool]) -> Result<u32> {
        if row.len() != self.input_dim {
            return Err(Error::Dimension {
                what: "input row width vs circuit input_dim",
                expected: self.input_dim,
                got: row.len(),
            });
        }
        let mut x = row.to_vec();
        for layer in &self.layers {
            x = layer
                .iter()
                .map(|g| g.gate.eval(x[g.in0 as usize], x[g.in1 as usize]))
                .collect();
        }
        let group = x.len() / self.classes;
        let mut best = (0, 0usize);
        for c in 0..self.classes {
            let s = x[c * group..(c + 1) * group].iter().filter(|&&b| b).count();
            if c == 0 || s > best.1 {
                best = (c, s);
            }
        }
        Ok(best.0 as u32)
    }
}

/// Snaps every neuron of `model` to its deployed gate.
pub fn export(model: &Model) -> Result<HardCircuit> {
    let gates = model.gates()?;
    let layers = gates
        .into_iter()
        .zip(&model.wiring.layers)
        .map(|(gs, pairs)| {
            gs.into_iter()
                .zip(pairs)
                .map(|(gate, &(in0, in1))| HardGate { gate, in0, in1 })
                .collect()
        })
        .collect();
    let c = HardCircuit {
        input_dim: model.config.input_dim,
        classes: model.config.classes,
        layers,
    };
    c.validate()?;
    Ok(c)
}
