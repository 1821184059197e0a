use std::path::Path;

use super::EncodedDataset;
use crate::error::{Error, Result};
use crate::netarch::Batch;

fn read(path: &Path) -> Result<Batch> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let headers = rdr.headers()?.clone();
    let label_col = headers
        .iter()
        .position(|h| h.trim() == "label")
        .ok_or_else(|| Error::format(path, "header has no `label` column"))?;
    let dim = headers.len() - 1;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |msg: String| Error::format(path, format!("row {}: {msg}", i + 2));
        if rec.len() != headers.len() {
            return Err(bad(format!("expected {} fields, found {}", headers.len(), rec.len())));
        }
        for (j, field) in rec.iter().enumerate() {
            let field = field.trim();
            if j == label_col {
                labels.push(field.parse::<u32>().map_err(|_| bad(format!("bad label `{field}`")))?);
            } else {
                features.push(match field {
                    "0" => 0.0,
                    "1" => 1.0,
                    _ => return Err(bad(format!("feature `{field}` is not 0/1"))),
                });
            }
        }
    }
    Ok(Batch { dim, features, labels })
}

/// Reads pre-binarized CSV data with a `label` column. `path` is either a
/// directory with `train.csv` and `test.csv` or one file used for both.
pub fn load_csv_binary(path: &Path) -> Result<EncodedDataset> {
    let (train, test) = if path.is_dir() {
        (read(&path.join("train.csv"))?, read(&path.join("test.csv"))?)
    } else {
        let b = read(path)?;
        (b.clone(), b)
    };
    if train.dim != test.dim {
        return Err(Error::format(path, "train and test widths differ"));
    }
    let classes = train.labels.iter().chain(&test.labels).max().map_or(1, |&m| m as usize + 1);
    Ok(EncodedDataset {
        name: path.file_stem().map_or("csv".into(), |s| s.to_string_lossy().into_owned()),
        dim: train.dim,
        classes: classes.max(2),
        train,
        test,
    })
}
