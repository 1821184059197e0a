use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use dlgn::checkpoint::Checkpoint;
use dlgn::circuit::{eval_packed, export as export_circuit, read_netlist, write_netlist, write_predictions, PackedBits};
use dlgn::codebook::codebook;
use dlgn::data::{DatasetSpec, EncodedDataset};
use dlgn::diagnostics::{
    commitment, gaps, gate_histogram, layer_entropies, records_csv, signal_survival,
};
use dlgn::fsutil::write_atomic;
use dlgn::netarch::{accuracy, Mode};
use dlgn::runconfig::RunConfig;
use dlgn::trainers::{basis_metrics as metrics, probe_batch, BasisSpec, Model, Trainer};
use dlgn::verify::{run_all, sign_flipped_codebook};
use dlgn::Exec;

use crate::{TrainArgs, UsageError, DATA_ROOT_VAR};

fn usage<E: std::fmt::Display>(e: E) -> anyhow::Error {
    UsageError(e.to_string()).into()
}

fn data_root() -> PathBuf {
    std::env::var_os(DATA_ROOT_VAR).map_or_else(|| PathBuf::from("data"), PathBuf::from)
}

fn load_dataset(spec: &str) -> Result<EncodedDataset> {
    let spec = DatasetSpec::parse(spec, &data_root()).map_err(usage)?;
    Ok(spec.load()?)
}

fn run_config(args: &TrainArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RunConfig::parse(&text).map_err(usage)?
        }
        None => RunConfig::default(),
    };
    let mut set = |k: &str, v: Option<String>| -> Result<()> {
        match v {
            Some(v) => cfg.set(k, &v).map_err(usage),
            None => Ok(()),
        }
    };
    set("dataset", args.dataset.clone())?;
    set("method", args.method.clone())?;
    set("depth", args.depth.map(|x| x.to_string()))?;
    set("width", args.width.map(|x| x.to_string()))?;
    set("tau", args.tau.map(|x| x.to_string()))?;
    set("init_sigma", args.init_sigma.map(|x| x.to_string()))?;
    set("wiring", args.wiring.clone())?;
    set("wiring_seed", args.wiring_seed.map(|x| x.to_string()))?;
    set("iters", args.iters.map(|x| x.to_string()))?;
    set("batch_size", args.batch_size.map(|x| x.to_string()))?;
    set("eval_every", args.eval_every.map(|x| x.to_string()))?;
    set("lr", args.lr.map(|x| x.to_string()))?;
    set("seeds", args.seeds.clone())?;
    set("out_dir", args.out.as_ref().map(|p| p.display().to_string()))?;
    set("ste_basis", args.ste_basis.clone())?;
    if args.parallel {
        set("deterministic", Some("false".into()))?;
    }
    for kv in &args.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| usage(format!("expected KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim()).map_err(usage)?;
    }
    Ok(cfg)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

struct SeedOutcome {
    seed: u64,
    last10: f64,
    best: f64,
    dg: f64,
}

/// Trains one seed, writing metrics and checkpoints into `cfg.out_dir`.
fn train_seed(cfg: &RunConfig, data: &EncodedDataset, seed: u64, resume: Option<Checkpoint>) -> Result<SeedOutcome> {
    let out = &cfg.out_dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let metrics_path = out.join(format!("metrics_seed{seed}.csv"));
    let ckpt_path = out.join(format!("checkpoint_seed{seed}.ckpt"));
    let opts = cfg.train_options(seed);
    let net = cfg.network_config(data.dim, data.classes).map_err(usage)?;

    let (mut trainer, mut lines) = match resume {
        Some(ck) => {
            if ck.model.config.input_dim != data.dim {
                bail!(
                    "checkpoint input_dim {} does not match dataset width {}",
                    ck.model.config.input_dim,
                    data.dim
                );
            }
            // Keep the rows up to the checkpoint iteration from an earlier metrics file.
            let prior = fs::read_to_string(&metrics_path).unwrap_or_default();
            let kept: Vec<String> = prior
                .lines()
                .skip(1)
                .filter(|l| l.split(',').next().and_then(|i| i.parse::<u64>().ok()).is_some_and(|i| i <= ck.iter))
                .map(String::from)
                .collect();
            let t = Trainer::resume(ck.model, ck.adam, ck.iter, ck.history, data, opts)?;
            (t, kept)
        }
        None => (Trainer::new(Model::init(net, seed)?, data, opts)?, Vec::new()),
    };
    let depth = trainer.model.config.depth;
    let header = String::from_utf8(records_csv(&[], depth)?)?;
    let mut last_dg = f64::NAN;
    trainer.run(|t, rec| {
        let row = String::from_utf8(records_csv(std::slice::from_ref(rec), depth)?)
            .expect("csv output is UTF-8");
        lines.push(row.lines().nth(1).unwrap_or_default().to_string());
        let mut text = header.clone();
        for l in &lines {
            text.push_str(l);
            text.push('\n');
        }
        write_atomic(&metrics_path, text.as_bytes())?;
        Checkpoint {
            config: cfg.clone(),
            seed,
            model: t.model.clone(),
            adam: t.adam.clone(),
            iter: t.iter,
            history: t.history.clone(),
        }
        .save(&ckpt_path)?;
        log::info!("seed {seed} iter {} hard_acc_test {:.4}", rec.iter, rec.hard_acc_test);
        last_dg = rec.dg;
        Ok(())
    })?;
    Ok(SeedOutcome {
        seed,
        last10: trainer.last10()?,
        best: trainer.best()?,
        dg: last_dg,
    })
}

fn summary_text(cfg: &RunConfig, outcomes: &[SeedOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        writeln!(s, "seed {}: last10 {:.4} best {:.4} dg {:.4}", o.seed, o.last10, o.best, o.dg).ok();
    }
    let (m, sd) = mean_std(&outcomes.iter().map(|o| o.last10).collect::<Vec<_>>());
    writeln!(
        s,
        "{} {} L={} k={}: last10 {:.2} +- {:.2} % over {} seeds",
        cfg.dataset,
        cfg.method.name(),
        cfg.depth,
        cfg.width,
        100.0 * m,
        100.0 * sd,
        outcomes.len()
    )
    .ok();
    s
}

pub fn train(args: &TrainArgs) -> Result<bool> {
    if let Some(path) = &args.resume {
        let ck = Checkpoint::load(path)?;
        let mut cfg = ck.config.clone();
        if let Some(i) = args.iters {
            cfg.iters = i;
        }
        if let Some(o) = &args.out {
            cfg.out_dir = o.clone();
        }
        let data = load_dataset(&cfg.dataset)?;
        let seed = ck.seed;
        let o = train_seed(&cfg, &data, seed, Some(ck))?;
        print!("{}", summary_text(&cfg, &[o]));
        return Ok(true);
    }
    let cfg = run_config(args)?;
    let data = load_dataset(&cfg.dataset)?;
    let outcomes = cfg
        .seeds
        .iter()
        .map(|&s| train_seed(&cfg, &data, s, None))
        .collect::<Result<Vec<_>>>()?;
    let text = summary_text(&cfg, &outcomes);
    write_atomic(&cfg.out_dir.join("summary.txt"), text.as_bytes())?;
    write_atomic(&cfg.out_dir.join("config.txt"), cfg.to_text().as_bytes())?;
    print!("{text}");
    Ok(true)
}

pub fn verify(inject_fault: bool) -> Result<bool> {
    let cb = if inject_fault { sign_flipped_codebook() } else { codebook().clone() };
    let results = run_all(&cb);
    let mut ok = true;
    for r in &results {
        ok &= r.passed;
        let tag = if r.passed { "PASS" } else { "FAIL" };
        if r.detail.is_empty() {
            println!("{tag}  {}", r.name);
        } else {
            println!("{tag}  {}  ({})", r.name, r.detail);
        }
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} properties, {failed} failed", results.len());
    Ok(ok)
}

pub fn export(checkpoint: &Path, out: &Path) -> Result<bool> {
    let ck = Checkpoint::load(checkpoint)?;
    let c = export_circuit(&ck.model)?;
    write_netlist(out, &c)?;
    println!(
        "wrote {} ({} layers x {} gates, {} classes)",
        out.display(),
        c.depth(),
        c.width(),
        c.classes
    );
    Ok(true)
}

pub fn run_circuit(
    netlist: &Path,
    dataset: &str,
    train_split: bool,
    checkpoint: Option<&Path>,
    predictions: Option<&Path>,
) -> Result<bool> {
    let circuit = read_netlist(netlist)?;
    let data = load_dataset(dataset)?;
    let batch = if train_split { &data.train } else { &data.test };
    let packed = PackedBits::from_batch(batch);
    let pred = eval_packed(&circuit, &packed, Exec::Parallel)?;
    let hits = pred.iter().zip(&batch.labels).filter(|(p, l)| p == l).count();
    let acc = hits as f64 / pred.len().max(1) as f64;
    println!("hard_acc {acc:.6} ({hits}/{})", pred.len());
    if let Some(ck) = checkpoint {
        let ck = Checkpoint::load(ck)?;
        let soft = accuracy(&ck.model, batch, Mode::Train, Exec::Parallel)?;
        println!("train_forward_acc {soft:.6}");
        println!("dg {:.6}", soft - acc);
    }
    if let Some(p) = predictions {
        write_predictions(p, &pred)?;
    }
    Ok(true)
}

pub fn diagnose(checkpoint: &Path, dataset: Option<&str>) -> Result<bool> {
    let ck = Checkpoint::load(checkpoint)?;
    let data = load_dataset(dataset.unwrap_or(&ck.config.dataset))?;
    let model = &ck.model;
    let exec = Exec::Parallel;
    let g = gaps(model, &data, exec)?;
    let probe = probe_batch(&data.train, ck.config.probe_size, ck.seed);
    println!("iter {}", ck.iter);
    println!("hard_acc_test {:.6}", g.hard_acc_test);
    println!("hard_acc_train {:.6}", g.hard_acc_train);
    println!("train_forward_acc {:.6}", g.train_forward_acc);
    println!("dg {:.6}", g.dg);
    println!("gen {:.6}", g.gen);
    println!("commitment_std_cab {:.6}", commitment(model));
    let ent = layer_entropies(model);
    let surv = signal_survival(model, &probe, exec)?;
    for (l, h) in gate_histogram(model)?.iter().enumerate() {
        let gates: Vec<String> = h
            .by_gate
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(j, c)| format!("{}={c}", dlgn::codebook::GateId::new(j as u8).expect("j < 16").name()))
            .collect();
        println!(
            "layer {l}: entropy {:.4} survival {:.4} classes {:?} gates {}",
            ent[l],
            surv[l],
            h.by_class,
            gates.join(" ")
        );
    }
    if let (Ok(l10), Ok(best)) = (dlgn::diagnostics::last10(&ck.history), dlgn::diagnostics::best(&ck.history)) {
        println!("last10 {l10:.6}");
        println!("best {best:.6}");
    }
    Ok(true)
}

pub fn sweep(axis: &str, values: &[String], args: &TrainArgs) -> Result<bool> {
    let base = run_config(args)?;
    let data = load_dataset(&base.dataset)?;
    let mut csv = String::from("axis,value,seed,last10,best,dg\n");
    for v in values {
        let mut cfg = base.clone();
        cfg.set(axis, v).map_err(usage)?;
        cfg.out_dir = base.out_dir.join(format!("{axis}_{v}"));
        for &seed in &cfg.seeds {
            let o = train_seed(&cfg, &data, seed, None)?;
            writeln!(csv, "{axis},{v},{seed},{:.6},{:.6},{:.6}", o.last10, o.best, o.dg).ok();
            println!("{axis}={v} seed {seed}: last10 {:.4}", o.last10);
        }
    }
    fs::create_dir_all(&base.out_dir)?;
    write_atomic(&base.out_dir.join("sweep.csv"), csv.as_bytes())?;
    Ok(true)
}

pub fn basis_metrics(bases: &[String]) -> Result<bool> {
    println!("basis,alpha,beta,coverage,coherence,bias");
    for b in bases {
        let spec: BasisSpec = b.parse().map_err(usage)?;
        let m = metrics(spec).map_err(usage)?;
        let (a, be) = spec.alpha_beta();
        println!("{spec},{a},{be},{:.6},{:.6},{:.6}", m.coverage, m.coherence, m.bias);
    }
    Ok(true)
}

