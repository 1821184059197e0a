use super::EncodedDataset;
use crate::codebook::{GateId, CORNERS};
use crate::error::{Error, Result};
use crate::netarch::Batch;

/// All `2^n` inputs labelled by their XOR; train and test are the same set.
pub fn parity(n: usize) -> Result<EncodedDataset> {
    if !(1..=20).contains(&n) {
        return Err(Error::Config(format!("parity width must be in 1..=20, got {n}")));
    }
    let rows = 1usize << n;
    let mut features = Vec::with_capacity(rows * n);
    let mut labels = Vec::with_capacity(rows);
    for i in 0..rows {
        for j in 0..n {
            features.push(((i >> j) & 1) as f32);
        }
        labels.push(i.count_ones() & 1);
    }
    let batch = Batch {
        dim: n,
        features,
        labels,
    };
    Ok(EncodedDataset {
        name: format!("parity{n}"),
        dim: n,
        classes: 2,
        train: batch.clone(),
        test: batch,
    })
}

/// The 4-row truth table of `g` in corner order.
pub fn single_gate(g: GateId) -> EncodedDataset {
    let mut features = Vec::with_capacity(8);
    let mut labels = Vec::with_capacity(4);
    for (i, &(a, b)) in CORNERS.iter().enumerate() {
        features.push(a as f32);
        features.push(b as f32);
        labels.push(g.bit(i) as u32);
    }
    let batch = Batch {
        dim: 2,
        features,
        labels,
    };
    EncodedDataset {
        name: format!("gate_{}", g.name()),
        dim: 2,
        classes: 2,
        train: batch.clone(),
        test: batch,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_two_is_xor() {
        let d = parity(2).unwrap();
        assert_eq!(d.train.labels, single_gate(GateId::XOR).train.labels);
        assert_eq!(d.train.features, single_gate(GateId::XOR).train.features);
    }

    #[test]
    fn parity_six_balanced() {
        let d = parity(6).unwrap();
        assert_eq!(d.train.rows(), 64);
        assert_eq!(d.train.labels.iter().filter(|&&l| l == 1).count(), 32);
        assert!(parity(21).is_err());
    }

    #[test]
    fn and_labels() {
        assert_eq!(single_gate(GateId::AND).train.labels, vec![0, 0, 0, 1]);
    }
}
