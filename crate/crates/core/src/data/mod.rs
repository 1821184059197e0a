//! Dataset loading, binarization and minibatch sampling.

mod mnist;
mod monks;
mod synthetic;
mod tabular;

use std::path::{Path, PathBuf};

use rand::Rng;

pub use mnist::{load_mnist, read_idx_images, read_idx_labels};
pub use monks::{encode_monks, load_monks2, monk2_target, monks2_generated, MONKS_ARITIES};
pub use synthetic::{parity, single_gate};
pub use tabular::load_csv_binary;

use crate::codebook::GateId;
use crate::error::{Error, Result};
use crate::netarch::Batch;
use crate::rng::{stream, Purpose};

/// Binary train/test matrices of one dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedDataset {
    pub name: String,
    pub dim: usize,
    pub classes: usize,
    pub train: Batch,
    pub test: Batch,
}

impl EncodedDataset {
    pub fn validate(&self) -> Result<()> {
        for (split, b) in [("train", &self.train), ("test", &self.test)] {
            if b.dim != self.dim || b.features.len() != b.rows() * self.dim {
                return Err(Error::Config(format!("{}: {split} split has wrong width", self.name)));
            }
            if b.features.iter().any(|&x| x != 0.0 && x != 1.0) {
                return Err(Error::Config(format!("{}: {split} features are not binary", self.name)));
            }
            if b.labels.iter().any(|&l| l as usize >= self.classes) {
                return Err(Error::Config(format!("{}: {split} label out of range", self.name)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Binarizer {
    /// `x > t`.
    Threshold(f64),
    /// `levels` features per value, thresholds `i / (levels + 1)`.
    Thermometer(usize),
}

impl Default for Binarizer {
    fn default() -> Self {
        Binarizer::Threshold(0.5)
    }
}

impl Binarizer {
    pub fn width(self) -> usize {
        match self {
            Binarizer::Threshold(_) => 1,
            Binarizer::Thermometer(levels) => levels,
        }
    }

    /// Appends the binary code of `x` (expected in `[0, 1]`) to `out`.
    pub fn encode_into(self, x: f64, out: &mut Vec<f32>) {
        match self {
            Binarizer::Threshold(t) => out.push(if x > t { 1.0 } else { 0.0 }),
            Binarizer::Thermometer(levels) => thermometer_into(x, levels, out),
        }
    }
}

fn thermometer_into(x: f64, levels: usize, out: &mut Vec<f32>) {
    let x = if (0.0..=1.0).contains(&x) {
        x
    } else {
        log::warn!("thermometer input {x} outside [0, 1], clamping");
        x.clamp(0.0, 1.0)
    };
    for i in 1..=levels {
        out.push(if x > i as f64 / (levels + 1) as f64 { 1.0 } else { 0.0 });
    }
}

/// Thermometer code of every value, `levels` features each.
pub fn thermometer_encode(values: &[f64], levels: usize) -> Result<Vec<f32>> {
    if levels == 0 {
        return Err(Error::Config("thermometer needs at least one level".into()));
    }
    let mut out = Vec::with_capacity(values.len() * levels);
    for &v in values {
        thermometer_into(v, levels, &mut out);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetSpec {
    /// Directory holding the four standard IDX files.
    Mnist(PathBuf, Binarizer),
    /// A `train.csv` / `test.csv` pair, or a single file used for both splits.
    CsvBinary(PathBuf),
    /// Directory holding `monks-2.train` and `monks-2.test`; regenerated when absent.
    Monks2(PathBuf),
    Parity(usize),
    SingleGate(GateId),
}

impl DatasetSpec {
    /// Parses `mnist`, `mnist:thermo<levels>`, `monks2`, `csv:<path>`,
    /// `parity<n>` / `parity:<n>` and `gate:<NAME>`. Relative locations are
    /// resolved against `root`.
    pub fn parse(s: &str, root: &Path) -> Result<DatasetSpec> {
        let bad = || Error::UnknownVariant {
            kind: "dataset",
            value: s.to_string(),
        };
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        Ok(match head {
            "mnist" => {
                let bin = match arg {
                    None => Binarizer::default(),
                    Some(a) => {
                        let levels = a.strip_prefix("thermo").ok_or_else(bad)?;
                        Binarizer::Thermometer(levels.parse().map_err(|_| bad())?)
                    }
                };
                DatasetSpec::Mnist(root.join("mnist"), bin)
            }
            "monks2" => DatasetSpec::Monks2(root.join(arg.unwrap_or("monks"))),
            "csv" => DatasetSpec::CsvBinary(root.join(arg.ok_or_else(bad)?)),
            "gate" => DatasetSpec::SingleGate(arg.ok_or_else(bad)?.parse()?),
            "parity" => DatasetSpec::Parity(arg.ok_or_else(bad)?.parse().map_err(|_| bad())?),
            _ => match head.strip_prefix("parity") {
                Some(n) if arg.is_none() => DatasetSpec::Parity(n.parse().map_err(|_| bad())?),
                _ => return Err(bad()),
            },
        })
    }

    pub fn load(&self) -> Result<EncodedDataset> {
        let data = match self {
            DatasetSpec::Mnist(dir, bin) => load_mnist(dir, *bin)?,
            DatasetSpec::CsvBinary(path) => load_csv_binary(path)?,
            DatasetSpec::Monks2(dir) => {
                if dir.join("monks-2.train").exists() {
                    load_monks2(dir)?
                } else {
                    log::warn!(
                        "{} has no MONK's files, using the regenerated split",
                        dir.display()
                    );
                    monks2_generated(0)
                }
            }
            DatasetSpec::Parity(n) => parity(*n)?,
            DatasetSpec::SingleGate(g) => single_gate(*g),
        };
        data.validate()?;
        Ok(data)
    }
}

/// Minibatch for iteration `iter`: `size` rows drawn uniformly with
/// replacement, or the whole split in order when `size >= rows`.
pub fn sample_batch(data: &Batch, size: usize, seed: u64, iter: u64) -> Batch {
    let n = data.rows();
    if size >= n {
        return data.clone();
    }
    let mut rng = stream(seed, Purpose::Batch, iter);
    let idx: Vec<usize> = (0..size).map(|_| rng.random_range(0..n as u32) as usize).collect();
    select_rows(data, &idx)
}

pub fn select_rows(data: &Batch, idx: &[usize]) -> Batch {
    let mut features = Vec::with_capacity(idx.len() * data.dim);
    let mut labels = Vec::with_capacity(idx.len());
    for &i in idx {
        features.extend_from_slice(data.row(i));
        labels.push(data.labels[i]);
    }
    Batch {
        dim: data.dim,
        features,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermometer_examples() {
        assert_eq!(thermometer_encode(&[0.0], 31).unwrap(), vec![0.0; 31]);
        assert_eq!(thermometer_encode(&[1.0], 31).unwrap(), vec![1.0; 31]);
        let half = thermometer_encode(&[0.5], 31).unwrap();
        assert_eq!(half.iter().filter(|&&x| x == 1.0).count(), 15);
        assert_eq!(thermometer_encode(&[7.0], 3).unwrap(), vec![1.0; 3]);
        assert!(thermometer_encode(&[0.5], 0).is_err());
    }

    #[test]
    fn spec_parsing() {
        let root = Path::new("/data");
        assert_eq!(DatasetSpec::parse("parity6", root).unwrap(), DatasetSpec::Parity(6));
        assert_eq!(DatasetSpec::parse("parity:3", root).unwrap(), DatasetSpec::Parity(3));
        assert_eq!(
            DatasetSpec::parse("gate:XOR", root).unwrap(),
            DatasetSpec::SingleGate(GateId::XOR)
        );
        assert_eq!(
            DatasetSpec::parse("mnist:thermo3", root).unwrap(),
            DatasetSpec::Mnist(root.join("mnist"), Binarizer::Thermometer(3))
        );
        assert!(DatasetSpec::parse("cifar10", root).is_err());
        assert!(DatasetSpec::parse("gate:FOO", root).is_err());
    }

    #[test]
    fn sampling() {
        let d = parity(4).unwrap();
        let b = sample_batch(&d.train, 64, 1, 0);
        assert_eq!(b, d.train);
        let b1 = sample_batch(&d.train, 5, 1, 3);
        let b2 = sample_batch(&d.train, 5, 1, 3);
        assert_eq!(b1, b2);
        assert_eq!(b1.rows(), 5);
    }
}
