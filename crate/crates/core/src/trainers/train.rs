//! Minibatch training loop with periodic hard evaluation.

use super::adam::AdamState;
use super::basis::BasisSpec;
use super::engine::{loss_and_grads, plan_layer};
use super::model::Model;
use crate::circuit::PackedBits;
use crate::data::{sample_batch, select_rows, EncodedDataset};
use crate::diagnostics::{
    commitment, gate_histogram, hard_accuracy, last10, best, layer_entropies, signal_survival, DiagnosticsRecord,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::netarch::{accuracy, check_batch, Batch, Mode};
use crate::rng::{stream, Purpose};

use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOptions {
    pub iters: u64,
    pub batch_size: usize,
    pub eval_every: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Run seed: parameter init, minibatches, Gumbel noise and the probe batch.
    pub seed: u64,
    pub basis: BasisSpec,
    pub exec: Exec,
    pub probe_size: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            iters: 50_000,
            batch_size: 512,
            eval_every: 1000,
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            seed: 0,
            basis: BasisSpec::Canonical,
            exec: Exec::Parallel,
            probe_size: 1024,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Window {
    loss: f64,
    steps: u64,
    ratio: f64,
    ratio_n: u64,
}

pub struct Trainer<'a> {
    pub model: Model,
    pub adam: AdamState,
    pub iter: u64,
    /// Hard test accuracy at every checkpoint so far.
    pub history: Vec<f64>,
    pub opts: TrainOptions,
    data: &'a EncodedDataset,
    probe: Batch,
    packed_train: PackedBits,
    packed_test: PackedBits,
    window: Window,
}

/// Fixed diagnostic rows: the whole train split when it is small enough,
/// otherwise `size` rows drawn with replacement under the run seed.
pub fn probe_batch(train: &Batch, size: usize, seed: u64) -> Batch {
    if train.rows() <= size {
        return train.clone();
    }
    let mut rng = stream(seed, Purpose::Probe, 0);
    let idx: Vec<usize> = (0..size).map(|_| rng.random_range(0..train.rows() as u32) as usize).collect();
    select_rows(train, &idx)
}

impl<'a> Trainer<'a> {
    pub fn new(model: Model, data: &'a EncodedDataset, opts: TrainOptions) -> Result<Self> {
        let adam = AdamState::new(model.params.len(), opts.lr, opts.beta1, opts.beta2);
        Self::resume(model, adam, 0, Vec::new(), data, opts)
    }

    /// Continues from a saved state taken at an evaluation boundary.
    pub fn resume(
        model: Model,
        adam: AdamState,
        iter: u64,
        history: Vec<f64>,
        data: &'a EncodedDataset,
        opts: TrainOptions,
    ) -> Result<Self> {
        if data.classes != model.config.classes {
            return Err(Error::Dimension {
                what: "dataset classes vs network classes",
                expected: model.config.classes,
                got: data.classes,
            });
        }
        check_batch(&model, &data.train)?;
        check_batch(&model, &data.test)?;
        if opts.batch_size == 0 || opts.eval_every == 0 {
            return Err(Error::Config("batch_size and eval_every must be positive".into()));
        }
        if data.train.rows() == 0 {
            return Err(Error::Config("training split is empty".into()));
        }
        Ok(Trainer {
            probe: probe_batch(&data.train, opts.probe_size, opts.seed),
            packed_train: PackedBits::from_batch(&data.train),
            packed_test: PackedBits::from_batch(&data.test),
            model,
            adam,
            iter,
            history,
            opts,
            data,
            window: Window::default(),
        })
    }

    /// One optimizer step; returns the minibatch loss.
    pub fn step(&mut self) -> Result<f64> {
        let batch = sample_batch(&self.data.train, self.opts.batch_size, self.opts.seed, self.iter);
        let mut rng = stream(self.opts.seed, Purpose::Gumbel, self.iter);
        let plans = (0..self.model.config.depth)
            .map(|l| plan_layer(&self.model, l, self.opts.basis, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let sg = loss_and_grads(&self.model, &plans, &batch.features, &batch.labels, self.opts.exec)?;
        if !sg.loss.is_finite() || sg.grads.iter().any(|g| !g.is_finite()) {
            return Err(Error::Diverged {
                iter: self.iter as usize,
                loss: sg.loss,
            });
        }
        self.adam.step(&mut self.model.params, &sg.grads)?;
        self.iter += 1;
        self.window.loss += sg.loss;
        self.window.steps += 1;
        let all: Vec<[f64; 4]> = sg.coeff_grads.into_iter().flatten().collect();
        if let Some(r) = crate::diagnostics::grad_coverage_ratio(&all) {
            self.window.ratio += r;
            self.window.ratio_n += 1;
        }
        Ok(sg.loss)
    }

    /// Measures the current model and closes the metrics window.
    pub fn evaluate(&mut self) -> Result<DiagnosticsRecord> {
        let exec = self.opts.exec;
        let hard_acc_test = hard_accuracy(&self.model, &self.data.test, Some(&self.packed_test), exec)?;
        let hard_acc_train = hard_accuracy(&self.model, &self.data.train, Some(&self.packed_train), exec)?;
        let train_forward_acc = accuracy(&self.model, &self.data.test, Mode::Train, exec)?;
        let w = std::mem::take(&mut self.window);
        Ok(DiagnosticsRecord {
            iter: self.iter,
            loss: if w.steps > 0 { w.loss / w.steps as f64 } else { f64::NAN },
            hard_acc_test,
            hard_acc_train,
            train_forward_acc,
            dg: train_forward_acc - hard_acc_test,
            grad_ratio: (w.ratio_n > 0).then(|| w.ratio / w.ratio_n as f64),
            commitment_std_cab: commitment(&self.model),
            entropy: layer_entropies(&self.model),
            survival: signal_survival(&self.model, &self.probe, exec)?,
            class_counts: gate_histogram(&self.model)?.into_iter().map(|h| h.by_class).collect(),
        })
    }

    /// Trains to `opts.iters`, evaluating every `eval_every` steps and at the end.
    pub fn run<F>(&mut self, mut on_eval: F) -> Result<()>
    where
        F: FnMut(&Trainer<'a>, &DiagnosticsRecord) -> Result<()>,
    {
        while self.iter < self.opts.iters {
            self.step()?;
            if self.iter % self.opts.eval_every == 0 || self.iter == self.opts.iters {
                let rec = self.evaluate()?;
                self.history.push(rec.hard_acc_test);
                on_eval(self, &rec)?;
            }
        }
        Ok(())
    }

    pub fn last10(&self) -> Result<f64> {
        last10(&self.history)
    }

    pub fn best(&self) -> Result<f64> {
        best(&self.history)
    }
}

/// Artifacts of a completed run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub model: Model,
    pub records: Vec<DiagnosticsRecord>,
    pub last10: f64,
    pub best: f64,
}

/// Initializes a model under `opts.seed` and trains it to completion.
pub fn train(config: crate::netarch::NetworkConfig, data: &EncodedDataset, opts: TrainOptions) -> Result<RunResult> {
    let model = Model::init(config, opts.seed)?;
    let mut trainer = Trainer::new(model, data, opts)?;
    let mut records = Vec::new();
    trainer.run(|_, r| {
        records.push(r.clone());
        Ok(())
    })?;
    Ok(RunResult {
        last10: trainer.last10()?,
        best: trainer.best()?,
        model: trainer.model,
        records,
    })
}
