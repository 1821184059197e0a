use crate::error::{Error, Result};
use crate::exec::Exec;

use super::wiring::Pair;

/// Rows per work chunk for batch-parallel loops.
pub const ROW_CHUNK: usize = 32;

/// Dense training batch: `rows x dim` features in {0,1} and a label per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Batch {
    pub dim: usize,
    pub features: Vec<f32>,
    pub labels: Vec<u32>,
}

impl Batch {
    pub fn rows(&self) -> usize {
        self.labels.len()
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }
}

/// Per-layer `rows x width` neuron outputs.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Activations {
    pub rows: usize,
    pub layers: Vec<Vec<f32>>,
}

impl Activations {
    pub fn last(&self) -> &[f32] {
        self.layers.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Output nonlinearity applied to `c^T psi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Squash {
    Identity,
    Logistic,
}

#[inline]
pub fn logistic(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn neuron(c: &[f32; 4], a: f32, b: f32, squash: Squash) -> f32 {
    let u = c[0] + c[1] * a + c[2] * b + c[3] * (a * b);
    match squash {
        Squash::Identity => u,
        Squash::Logistic => logistic(u),
    }
}

/// Evaluates one layer over all rows into `out` (`rows x pairs.len()`).
pub(crate) fn eval_layer_into(
    coeffs: &[[f32; 4]],
    squash: Squash,
    inputs: &[f32],
    in_width: usize,
    pairs: &[Pair],
    out: &mut [f32],
    exec: Exec,
) {
    let k = pairs.len();
    exec.map_chunks_mut(out, ROW_CHUNK * k, |ci, chunk| {
        let row0 = ci * ROW_CHUNK;
        for (r, out_row) in chunk.chunks_mut(k).enumerate() {
            let x = &inputs[(row0 + r) * in_width..(row0 + r + 1) * in_width];
            for ((o, &(i0, i1)), c) in out_row.iter_mut().zip(pairs).zip(coeffs) {
                *o = neuron(c, x[i0 as usize], x[i1 as usize], squash);
            }
        }
    });
}

/// `z[n] = c0 + ca*a + cb*b + cab*a*b` per neuron, with `(a, b)` the wired inputs.
pub fn eval_layer(coeffs: &[[f32; 4]], inputs: &[f32], in_width: usize, pairs: &[Pair]) -> Result<Vec<f32>> {
    if coeffs.len() != pairs.len() {
        return Err(Error::Dimension {
            what: "coefficient rows per wired neuron",
            expected: pairs.len(),
            got: coeffs.len(),
        });
    }
    if in_width == 0 || inputs.len() % in_width != 0 {
        return Err(Error::Dimension {
            what: "input matrix width",
            expected: in_width,
            got: inputs.len(),
        });
    }
    if let Some(&(a, b)) = pairs.iter().find(|&&(a, b)| a.max(b) as usize >= in_width) {
        return Err(Error::Dimension {
            what: "wiring index within input width",
            expected: in_width,
            got: a.max(b) as usize,
        });
    }
    let rows = inputs.len() / in_width;
    let mut out = vec![0.0; rows * pairs.len()];
    eval_layer_into(coeffs, Squash::Identity, inputs, in_width, pairs, &mut out, Exec::Sequential);
    Ok(out)
}

/// Contiguous GroupSum: class `c` sums neurons `[c*k/C, (c+1)*k/C)`.
pub fn group_sum(acts: &[f32], width: usize, classes: usize) -> Result<Vec<f32>> {
    if classes == 0 || width % classes != 0 {
        return Err(Error::Config(format!(
            "width {width} is not divisible by class count {classes}"
        )));
    }
    let group = width / classes;
    Ok(acts
        .chunks(width)
        .flat_map(|row| row.chunks(group).map(|g| g.iter().sum::<f32>()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const AND: [f32; 4] = [0.0, 0.0, 0.0, 1.0];
    const XOR: [f32; 4] = [0.0, 1.0, 1.0, -2.0];

    #[test]
    fn layer_examples() {
        let pairs = [(0, 1)];
        assert_eq!(eval_layer(&[AND], &[1.0, 1.0], 2, &pairs).unwrap(), vec![1.0]);
        assert_eq!(eval_layer(&[AND], &[1.0, 0.0], 2, &pairs).unwrap(), vec![0.0]);
        let half = [0.5, 0.0, 0.0, 0.0];
        assert_eq!(eval_layer(&[half], &[0.3, 0.9], 2, &pairs).unwrap(), vec![0.5]);
        assert_eq!(eval_layer(&[XOR], &[0.5, 0.5], 2, &pairs).unwrap(), vec![0.5]);
        assert!(eval_layer(&[XOR], &[0.5, 0.5], 2, &[(0, 2)]).is_err());
    }

    #[test]
    fn group_sum_examples() {
        assert_eq!(group_sum(&[1.0, 0.0, 1.0, 1.0], 4, 2).unwrap(), vec![1.0, 2.0]);
        assert_eq!(group_sum(&[0.0; 4], 4, 2).unwrap(), vec![0.0, 0.0]);
        assert_eq!(group_sum(&[0.3, 0.7], 2, 2).unwrap(), vec![0.3, 0.7]);
        assert!(group_sum(&[0.0; 3], 3, 2).is_err());
    }
}
