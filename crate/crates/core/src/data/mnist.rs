use std::fs;
use std::path::Path;

use super::{Binarizer, EncodedDataset};
use crate::error::{Error, Result};
use crate::netarch::Batch;

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_be_bytes(bytes[at..at + 4].try_into().expect("4 bytes"))
}

/// Returns `(count, rows, cols, pixels)` of an IDX3 image file.
pub fn read_idx_images(path: &Path) -> Result<(usize, usize, usize, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 16 {
        return Err(Error::format(path, "truncated IDX header"));
    }
    let magic = be_u32(&bytes, 0);
    if magic != IMAGES_MAGIC {
        return Err(Error::format(path, format!("bad image magic {magic:#010x}")));
    }
    let (n, r, c) = (be_u32(&bytes, 4) as usize, be_u32(&bytes, 8) as usize, be_u32(&bytes, 12) as usize);
    let body = &bytes[16..];
    if body.len() != n * r * c {
        return Err(Error::format(
            path,
            format!("expected {} pixel bytes, found {}", n * r * c, body.len()),
        ));
    }
    Ok((n, r, c, body.to_vec()))
}

pub fn read_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 8 {
        return Err(Error::format(path, "truncated IDX header"));
    }
    let magic = be_u32(&bytes, 0);
    if magic != LABELS_MAGIC {
        return Err(Error::format(path, format!("bad label magic {magic:#010x}")));
    }
    let n = be_u32(&bytes, 4) as usize;
    if bytes.len() - 8 != n {
        return Err(Error::format(path, format!("expected {n} labels, found {}", bytes.len() - 8)));
    }
    Ok(bytes[8..].to_vec())
}

fn split(dir: &Path, prefix: &str, bin: Binarizer) -> Result<Batch> {
    let img_path = dir.join(format!("{prefix}-images-idx3-ubyte"));
    let lbl_path = dir.join(format!("{prefix}-labels-idx1-ubyte"));
    let (n, r, c, pixels) = read_idx_images(&img_path)?;
    let labels = read_idx_labels(&lbl_path)?;
    if labels.len() != n {
        return Err(Error::format(
            &lbl_path,
            format!("{} labels for {n} images", labels.len()),
        ));
    }
    if let Some(l) = labels.iter().find(|&&l| l > 9) {
        return Err(Error::format(&lbl_path, format!("label {l} out of range")));
    }
    let mut features = Vec::with_capacity(n * r * c * bin.width());
    for &p in &pixels {
        bin.encode_into(p as f64 / 255.0, &mut features);
    }
    Ok(Batch {
        dim: r * c * bin.width(),
        features,
        labels: labels.into_iter().map(u32::from).collect(),
    })
}

/// Loads the standard MNIST split from `dir` (uncompressed IDX files).
pub fn load_mnist(dir: &Path, bin: Binarizer) -> Result<EncodedDataset> {
    let train = split(dir, "train", bin)?;
    let test = split(dir, "t10k", bin)?;
    if train.dim != test.dim {
        return Err(Error::format(dir, "train and test image sizes differ"));
    }
    Ok(EncodedDataset {
        name: "mnist".into(),
        dim: train.dim,
        classes: 10,
        train,
        test,
    })
}
