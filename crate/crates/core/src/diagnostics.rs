//! Measurements taken at evaluation checkpoints.

use std::path::Path;

use crate::circuit::{eval_packed, export, PackedBits};
use crate::codebook::{GateClass, CODEBOOK, NUM_GATES};
use crate::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::netarch::{accuracy, forward, Batch, Method, Mode};
use crate::trainers::{Model, Weights};

/// Shannon entropy in nats.
pub fn entropy(w: &Weights) -> f64 {
    -w.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

/// Mean entropy of a set of selection weights.
pub fn gate_entropy(weights: &[Weights]) -> f64 {
    if weights.is_empty() {
        return 0.0;
    }
    weights.iter().map(entropy).sum::<f64>() / weights.len() as f64
}

/// Per-layer mean selection entropy of `model`.
pub fn layer_entropies(model: &Model) -> Vec<f64> {
    (0..model.config.depth)
        .map(|l| {
            let w: Vec<Weights> = (0..model.config.width).map(|n| model.selection_weights(l, n)).collect();
            gate_entropy(&w)
        })
        .collect()
}

/// Coherent over incoherent input-gradient magnitude of a gate mixture at `(a, b)`.
///
/// `|sum_j w_j dg_j/da| + |sum_j w_j dg_j/db|` divided by
/// `sum_j w_j (|dg_j/da| + |dg_j/db|)`; 1 when the denominator vanishes.
pub fn neuron_survival(w: &Weights, a: f64, b: f64) -> f64 {
    let (mut ca, mut cb, mut inc) = (0.0, 0.0, 0.0);
    for (p, row) in w.iter().zip(CODEBOOK.iter()) {
        let da = row[1] as f64 + row[3] as f64 * b;
        let db = row[2] as f64 + row[3] as f64 * a;
        ca += p * da;
        cb += p * db;
        inc += p * (da.abs() + db.abs());
    }
    if inc == 0.0 {
        1.0
    } else {
        (ca.abs() + cb.abs()) / inc
    }
}

/// Weights used by the survival measurement: `pi` for Soft-Mix, `omega` for
/// CovJac, and a one-hot on the deployed gate for single-gate methods.
pub fn survival_weights(model: &Model, layer: usize, neuron: usize) -> Result<Weights> {
    Ok(match model.method() {
        Method::SoftMix | Method::MultilinearCovJac => model.selection_weights(layer, neuron),
        _ => {
            let mut w = [0.0; NUM_GATES];
            w[model.gate(layer, neuron)?.index()] = 1.0;
            w
        }
    })
}

/// Per-layer signal survival averaged over neurons and the rows of `probe`,
/// with layer inputs taken from the hard forward pass.
pub fn signal_survival(model: &Model, probe: &Batch, exec: Exec) -> Result<Vec<f64>> {
    let (acts, _) = forward(model, probe, Mode::Hard, exec)?;
    let rows = probe.rows();
    let k = model.config.width;
    let mut out = Vec::with_capacity(model.config.depth);
    for l in 0..model.config.depth {
        let (input, in_w) = if l == 0 {
            (probe.features.as_slice(), probe.dim)
        } else {
            (acts.layers[l - 1].as_slice(), k)
        };
        let mut total = 0.0;
        for (n, &(i0, i1)) in model.wiring.layers[l].iter().enumerate() {
            let w = survival_weights(model, l, n)?;
            let s = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)].map(|(a, b)| neuron_survival(&w, a, b));
            let mut counts = [0usize; 4];
            for r in 0..rows {
                let a = input[r * in_w + i0 as usize] != 0.0;
                let b = input[r * in_w + i1 as usize] != 0.0;
                counts[a as usize | (b as usize) << 1] += 1;
            }
            total += (0..4).map(|c| s[c] * counts[c] as f64).sum::<f64>() / rows.max(1) as f64;
        }
        out.push(total / k as f64);
    }
    Ok(out)
}

/// `mean_n |g_cab| / mean_n |g_c0|` over per-neuron coefficient gradients;
/// `None` when the denominator is zero.
pub fn grad_coverage_ratio(grads: &[[f64; 4]]) -> Option<f64> {
    let num: f64 = grads.iter().map(|g| g[3].abs()).sum();
    let den: f64 = grads.iter().map(|g| g[0].abs()).sum();
    (den > 0.0).then(|| num / den)
}

/// Population standard deviation of the continuous interaction coefficient
/// over every neuron.
pub fn commitment(model: &Model) -> f64 {
    let mut vals = Vec::with_capacity(model.config.depth * model.config.width);
    for l in 0..model.config.depth {
        for n in 0..model.config.width {
            vals.push(match model.method() {
                Method::MultilinearCovJac => model.neuron_params(l, n)[3] as f64,
                _ => model.soft_coeffs(l, n)[3],
            });
        }
    }
    population_std(&vals)
}

pub fn population_std(vals: &[f64]) -> f64 {
    if vals.is_empty() {
        return 0.0;
    }
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayerHistogram {
    pub by_class: [usize; 4],
    pub by_gate: [usize; NUM_GATES],
}

pub fn gate_histogram(model: &Model) -> Result<Vec<LayerHistogram>> {
    model
        .gates()?
        .into_iter()
        .map(|layer| {
            let mut h = LayerHistogram::default();
            for g in layer {
                h.by_gate[g.index()] += 1;
                h.by_class[g.class().index()] += 1;
            }
            Ok(h)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gaps {
    pub train_forward_acc: f64,
    pub hard_acc_test: f64,
    pub hard_acc_train: f64,
    /// Train-mode minus hard accuracy on the test split.
    pub dg: f64,
    /// Hard train minus hard test accuracy.
    pub gen: f64,
}

/// Hard accuracy of the exported circuit on `batch` via packed evaluation.
pub fn hard_accuracy(model: &Model, batch: &Batch, packed: Option<&PackedBits>, exec: Exec) -> Result<f64> {
    let circuit = export(model)?;
    let own;
    let packed = match packed {
        Some(p) => p,
        None => {
            own = PackedBits::from_batch(batch);
            &own
        }
    };
    let pred = eval_packed(&circuit, packed, exec)?;
    if pred.is_empty() {
        return Ok(0.0);
    }
    Ok(pred.iter().zip(&batch.labels).filter(|(p, l)| p == l).count() as f64 / pred.len() as f64)
}

pub fn gaps(model: &Model, data: &EncodedDataset, exec: Exec) -> Result<Gaps> {
    let train_forward_acc = accuracy(model, &data.test, Mode::Train, exec)?;
    let hard_acc_test = hard_accuracy(model, &data.test, None, exec)?;
    let hard_acc_train = hard_accuracy(model, &data.train, None, exec)?;
    Ok(Gaps {
        train_forward_acc,
        hard_acc_test,
        hard_acc_train,
        dg: train_forward_acc - hard_acc_test,
        gen: hard_acc_train - hard_acc_test,
    })
}

/// Mean of the last `min(10, len)` entries.
pub fn last10(history: &[f64]) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::EmptyHistory);
    }
    let tail = &history[history.len().saturating_sub(10)..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    // Rounding can push the mean of equal values just above them.
    Ok(mean.min(tail.iter().copied().fold(f64::NEG_INFINITY, f64::max)))
}

pub fn best(history: &[f64]) -> Result<f64> {
    history.iter().copied().reduce(f64::max).ok_or(Error::EmptyHistory)
}

/// One metrics row per evaluation checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub iter: u64,
    /// Mean training loss since the previous checkpoint.
    pub loss: f64,
    pub hard_acc_test: f64,
    pub hard_acc_train: f64,
    /// Train-mode forward accuracy on the test split.
    pub train_forward_acc: f64,
    pub dg: f64,
    pub grad_ratio: Option<f64>,
    pub commitment_std_cab: f64,
    pub entropy: Vec<f64>,
    pub survival: Vec<f64>,
    pub class_counts: Vec<[usize; 4]>,
}

impl DiagnosticsRecord {
    /// Column names for a network of `depth` layers.
    pub fn header(depth: usize) -> Vec<String> {
        let mut h: Vec<String> = [
            "iter",
            "loss",
            "hard_acc_test",
            "hard_acc_train",
            "train_forward_acc",
            "dg",
            "grad_ratio",
            "commitment_std_cab",
        ]
        .map(String::from)
        .to_vec();
        h.extend((0..depth).map(|l| format!("entropy_l{l}")));
        h.extend((0..depth).map(|l| format!("survival_l{l}")));
        for l in 0..depth {
            h.extend(GateClass::ALL.iter().map(|c| format!("{}_l{l}", c.name())));
        }
        h
    }

    pub fn fields(&self) -> Vec<String> {
        let f = |x: f64| format!("{x:.6}");
        let mut v = vec![
            self.iter.to_string(),
            f(self.loss),
            f(self.hard_acc_test),
            f(self.hard_acc_train),
            f(self.train_forward_acc),
            f(self.dg),
            self.grad_ratio.map(f).unwrap_or_default(),
            f(self.commitment_std_cab),
        ];
        v.extend(self.entropy.iter().map(|&x| f(x)));
        v.extend(self.survival.iter().map(|&x| f(x)));
        for c in &self.class_counts {
            v.extend(c.iter().map(usize::to_string));
        }
        v
    }
}

/// Renders records as CSV text with the stable column order.
pub fn records_csv(records: &[DiagnosticsRecord], depth: usize) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DiagnosticsRecord::header(depth))?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.into_inner().map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

pub fn write_records(path: &Path, records: &[DiagnosticsRecord], depth: usize) -> Result<()> {
    let bytes = records_csv(records, depth)?;
    crate::fsutil::write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::GateId;

    #[test]
    fn entropy_bounds() {
        assert!((entropy(&[1.0 / 16.0; 16]) - 16f64.ln()).abs() < 1e-12);
        let mut one = [0.0; 16];
        one[3] = 1.0;
        assert_eq!(entropy(&one), 0.0);
    }

    #[test]
    fn survival_examples() {
        let u = [1.0 / 16.0; 16];
        for (a, b) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            assert_eq!(neuron_survival(&u, a, b), 0.0);
        }
        let mut w = [0.0; 16];
        w[GateId::XOR.index()] = 1.0;
        assert_eq!(neuron_survival(&w, 1.0, 0.0), 1.0);
        let mut w = [0.0; 16];
        w[GateId::TRUE.index()] = 1.0;
        assert_eq!(neuron_survival(&w, 1.0, 0.0), 1.0);
    }

    #[test]
    fn history_metrics() {
        assert_eq!(last10(&[0.9; 3]).unwrap(), 0.9);
        let mut h = vec![0.1; 40];
        h.extend([0.9; 10]);
        assert!((last10(&h).unwrap() - 0.9).abs() < 1e-12);
        assert!(best(&h).unwrap() >= last10(&h).unwrap());
        assert!(last10(&[]).is_err());
        assert!(best(&[]).is_err());
    }

    #[test]
    fn commitment_toy() {
        assert_eq!(population_std(&[0.0, 2.0]), 1.0);
        assert_eq!(population_std(&[0.7; 5]), 0.0);
    }

    #[test]
    fn ratio_missing_on_zero_denominator() {
        assert_eq!(grad_coverage_ratio(&[[0.0, 1.0, 1.0, 1.0]]), None);
        assert_eq!(grad_coverage_ratio(&[[2.0, 0.0, 0.0, 1.0], [2.0, 0.0, 0.0, -1.0]]), Some(0.5));
    }

    #[test]
    fn csv_columns() {
        let h = DiagnosticsRecord::header(2);
        assert_eq!(h.len(), 8 + 2 + 2 + 8);
        assert_eq!(h[8], "entropy_l0");
        assert_eq!(h[12], "constant_l0");
        assert_eq!(h[19], "strong_interaction_l1");
    }
}
