use std::fs;
use std::path::Path;

use rand::seq::index::sample;

use super::EncodedDataset;
use crate::error::{Error, Result};
use crate::netarch::Batch;
use crate::rng::{stream, Purpose};

pub const MONKS_ARITIES: [u8; 6] = [3, 3, 2, 3, 4, 2];
const TRAIN_SIZE: usize = 169;

/// One-hot code of six 1-based attribute values (17 features).
pub fn encode_monks(attrs: &[u8; 6]) -> Option<Vec<f32>> {
    let mut out = Vec::with_capacity(17);
    for (&v, &arity) in attrs.iter().zip(&MONKS_ARITIES) {
        if v == 0 || v > arity {
            return None;
        }
        for j in 1..=arity {
            out.push(if j == v { 1.0 } else { 0.0 });
        }
    }
    Some(out)
}

/// Second MONK's concept: exactly two attributes take their first value.
pub fn monk2_target(attrs: &[u8; 6]) -> bool {
    attrs.iter().filter(|&&v| v == 1).count() == 2
}

fn parse_file(path: &Path) -> Result<Batch> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let bad = |msg: &str| Error::format(path, format!("line {}: {msg}", i + 1));
        if fields.len() < 7 {
            return Err(bad("expected class and six attributes"));
        }
        let nums: Vec<u8> = fields[..7]
            .iter()
            .map(|f| f.parse::<u8>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("non-integer field"))?;
        if nums[0] > 1 {
            return Err(bad("class must be 0 or 1"));
        }
        let attrs: [u8; 6] = nums[1..7].try_into().expect("six values");
        features.extend(encode_monks(&attrs).ok_or_else(|| bad("attribute value out of range"))?);
        labels.push(nums[0] as u32);
    }
    Ok(Batch {
        dim: 17,
        features,
        labels,
    })
}

/// Loads `monks-2.train` / `monks-2.test` from `dir`.
pub fn load_monks2(dir: &Path) -> Result<EncodedDataset> {
    Ok(EncodedDataset {
        name: "monks2".into(),
        dim: 17,
        classes: 2,
        train: parse_file(&dir.join("monks-2.train"))?,
        test: parse_file(&dir.join("monks-2.test"))?,
    })
}

fn all_instances() -> Vec<[u8; 6]> {
    let mut out = Vec::with_capacity(432);
    let mut a = [1u8; 6];
    loop {
        out.push(a);
        let mut i = 5;
        loop {
            if a[i] < MONKS_ARITIES[i] {
                a[i] += 1;
                break;
            }
            a[i] = 1;
            if i == 0 {
                return out;
            }
            i -= 1;
        }
    }
}

fn batch_of(instances: &[[u8; 6]]) -> Batch {
    let mut features = Vec::with_capacity(instances.len() * 17);
    let mut labels = Vec::with_capacity(instances.len());
    for a in instances {
        features.extend(encode_monks(a).expect("valid instance"));
        labels.push(monk2_target(a) as u32);
    }
    Batch {
        dim: 17,
        features,
        labels,
    }
}

/// MONK's-2 rebuilt from its concept definition: the test split is all 432
/// instances and the train split is 169 of them drawn without replacement.
pub fn monks2_generated(seed: u64) -> EncodedDataset {
    let all = all_instances();
    let mut rng = stream(seed, Purpose::Split, 2);
    let mut idx = sample(&mut rng, all.len(), TRAIN_SIZE).into_vec();
    idx.sort_unstable();
    let train: Vec<[u8; 6]> = idx.iter().map(|&i| all[i]).collect();
    EncodedDataset {
        name: "monks2".into(),
        dim: 17,
        classes: 2,
        train: batch_of(&train),
        test: batch_of(&all),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_hot() {
        let e = encode_monks(&[1, 1, 1, 1, 1, 1]).unwrap();
        assert_eq!(e.len(), 17);
        assert_eq!(e.iter().filter(|&&x| x == 1.0).count(), 6);
        assert!(encode_monks(&[4, 1, 1, 1, 1, 1]).is_none());
    }

    #[test]
    fn generated_split() {
        let d = monks2_generated(0);
        assert_eq!(d.test.rows(), 432);
        assert_eq!(d.train.rows(), 169);
        for r in 0..d.test.rows() {
            assert_eq!(d.test.row(r).iter().filter(|&&x| x == 1.0).count(), 6);
        }
        let pos = d.test.labels.iter().filter(|&&l| l == 1).count();
        // C(6,2) choices of the two first-valued attributes times the
        // non-first values of the other four.
        assert_eq!(pos, 142);
        assert_eq!(d, monks2_generated(0));
    }

    #[test]
    fn parses_standard_rows() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("monks-2.train"), " 1 1 1 2 2 3 2 data_1\n 0 1 1 1 1 1 1 data_2\n").unwrap();
        fs::write(dir.path().join("monks-2.test"), " 0 3 3 2 3 4 2 data_9\n").unwrap();
        let d = load_monks2(dir.path()).unwrap();
        assert_eq!(d.train.labels, vec![1, 0]);
        assert_eq!(d.test.rows(), 1);
        fs::write(dir.path().join("monks-2.test"), " 0 3 3 2 3 9 2 data_9\n").unwrap();
        assert!(load_monks2(dir.path()).is_err());
    }
}
