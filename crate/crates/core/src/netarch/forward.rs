use super::layer::{group_sum, Activations, Batch};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::rng::{stream, Purpose};
use crate::trainers::engine::{forward_plans, hard_plan, plan_layer, LayerPlan};
use crate::trainers::{BasisSpec, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Method-specific training forward. Gumbel-ST draws its noise from a
    /// fixed evaluation stream keyed by the wiring seed.
    Train,
    /// Every neuron replaced by its deployed gate.
    Hard,
}

pub(crate) fn check_batch(model: &Model, batch: &Batch) -> Result<()> {
    let cfg = &model.config;
    if batch.dim != cfg.input_dim {
        return Err(Error::Dimension {
            what: "batch feature width vs network input_dim",
            expected: cfg.input_dim,
            got: batch.dim,
        });
    }
    if batch.features.len() != batch.rows() * batch.dim {
        return Err(Error::Dimension {
            what: "feature matrix size",
            expected: batch.rows() * batch.dim,
            got: batch.features.len(),
        });
    }
    if let Some(&l) = batch.labels.iter().find(|&&l| l as usize >= cfg.classes) {
        return Err(Error::Dimension {
            what: "label below class count",
            expected: cfg.classes,
            got: l as usize,
        });
    }
    Ok(())
}

pub(crate) fn plans(model: &Model, mode: Mode) -> Result<Vec<LayerPlan>> {
    let mut rng = stream(model.config.seed, Purpose::EvalGumbel, 0);
    (0..model.config.depth)
        .map(|l| match mode {
            Mode::Train => plan_layer(model, l, BasisSpec::Canonical, &mut rng),
            Mode::Hard => hard_plan(model, l),
        })
        .collect()
}

/// Full forward pass: per-layer activations and `rows x C` GroupSum logits.
pub fn forward(model: &Model, batch: &Batch, mode: Mode, exec: Exec) -> Result<(Activations, Vec<f32>)> {
    check_batch(model, batch)?;
    let plans = plans(model, mode)?;
    let acts = forward_plans(model, &plans, &batch.features, batch.rows(), exec);
    let logits = group_sum(acts.last(), model.config.width, model.config.classes)?;
    Ok((acts, logits))
}

/// Index of the largest logit per row; the smallest class wins ties.
pub fn argmax_rows(logits: &[f32], classes: usize) -> Vec<u32> {
    logits
        .chunks(classes)
        .map(|row| {
            let mut best = 0;
            for c in 1..row.len() {
                if row[c] > row[best] {
                    best = c;
                }
            }
            best as u32
        })
        .collect()
}

/// Class predictions in `mode`, evaluated in blocks of rows to bound memory.
pub fn predict(model: &Model, batch: &Batch, mode: Mode, exec: Exec) -> Result<Vec<u32>> {
    check_batch(model, batch)?;
    let plans = plans(model, mode)?;
    let block = 1024;
    let mut out = Vec::with_capacity(batch.rows());
    for start in (0..batch.rows()).step_by(block) {
        let end = (start + block).min(batch.rows());
        let feats = &batch.features[start * batch.dim..end * batch.dim];
        let acts = forward_plans(model, &plans, feats, end - start, exec);
        let logits = group_sum(acts.last(), model.config.width, model.config.classes)?;
        out.extend(argmax_rows(&logits, model.config.classes));
    }
    Ok(out)
}

/// Fraction of rows whose prediction in `mode` equals the label.
pub fn accuracy(model: &Model, batch: &Batch, mode: Mode, exec: Exec) -> Result<f64> {
    let pred = predict(model, batch, mode, exec)?;
    if pred.is_empty() {
        return Ok(0.0);
    }
    let hits = pred.iter().zip(&batch.labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / pred.len() as f64)
}
