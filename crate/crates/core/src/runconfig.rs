//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Keys:
//!
//! | key | default |
//! |---|---|
//! | `dataset` | `monks2` |
//! | `method` | `multilinear_covjac` |
//! | `depth` (`L`) | 6 |
//! | `width` (`k`) | 136 |
//! | `tau` | 1.0 |
//! | `init_sigma` | 1.0 |
//! | `wiring` | `stride` |
//! | `wiring_seed` | 0 |
//! | `iters` | 50000 |
//! | `batch_size` | 512 |
//! | `eval_every` | 1000 |
//! | `lr`, `beta1`, `beta2` | 0.01, 0.9, 0.999 |
//! | `seeds` | `0,1,2` |
//! | `out_dir` | `runs` |
//! | `deterministic` | `true` |
//! | `ste_basis` | `canonical` |
//! | `probe_size` | 1024 |

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::netarch::{Method, NetworkConfig, WiringScheme};
use crate::trainers::{BasisSpec, TrainOptions};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub dataset: String,
    pub method: Method,
    pub depth: usize,
    pub width: usize,
    pub tau: f64,
    pub init_sigma: f64,
    pub wiring: WiringScheme,
    pub wiring_seed: u64,
    pub iters: u64,
    pub batch_size: usize,
    pub eval_every: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Single-threaded execution. Parallel runs give the same bits; this
    /// flag exists to pin the execution order explicitly.
    pub deterministic: bool,
    pub ste_basis: BasisSpec,
    pub probe_size: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset: "monks2".into(),
            method: Method::MultilinearCovJac,
            depth: 6,
            width: 136,
            tau: 1.0,
            init_sigma: 1.0,
            wiring: WiringScheme::Stride,
            wiring_seed: 0,
            iters: 50_000,
            batch_size: 512,
            eval_every: 1000,
            lr: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            seeds: vec![0, 1, 2],
            out_dir: PathBuf::from("runs"),
            deterministic: true,
            ste_basis: BasisSpec::Canonical,
            probe_size: 1024,
        }
    }
}

pub const KEYS: [&str; 19] = [
    "dataset",
    "method",
    "depth",
    "width",
    "tau",
    "init_sigma",
    "wiring",
    "wiring_seed",
    "iters",
    "batch_size",
    "eval_every",
    "lr",
    "beta1",
    "beta2",
    "seeds",
    "out_dir",
    "deterministic",
    "ste_basis",
    "probe_size",
];

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("invalid value `{v}` for key `{key}`")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    /// Sets one key; unknown keys are rejected by name.
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "dataset" => self.dataset = v.to_string(),
            "method" => self.method = v.parse()?,
            "depth" | "L" => self.depth = num(key, v)?,
            "width" | "k" => self.width = num(key, v)?,
            "tau" => self.tau = num(key, v)?,
            "init_sigma" => self.init_sigma = num(key, v)?,
            "wiring" => self.wiring = v.parse()?,
            "wiring_seed" => self.wiring_seed = num(key, v)?,
            "iters" => self.iters = num(key, v)?,
            "batch_size" => self.batch_size = num(key, v)?,
            "eval_every" => self.eval_every = num(key, v)?,
            "lr" => self.lr = num(key, v)?,
            "beta1" => self.beta1 = num(key, v)?,
            "beta2" => self.beta2 = num(key, v)?,
            "seeds" => {
                self.seeds = v
                    .split(',')
                    .map(|s| num(key, s.trim()))
                    .collect::<Result<_>>()?;
                if self.seeds.is_empty() {
                    return Err(Error::Config("`seeds` must list at least one seed".into()));
                }
            }
            "out_dir" => self.out_dir = PathBuf::from(v),
            "deterministic" => self.deterministic = num(key, v)?,
            "ste_basis" => self.ste_basis = v.parse()?,
            "probe_size" => self.probe_size = num(key, v)?,
            _ => return Err(Error::Config(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Canonical text form; `parse(to_text())` reproduces `self`.
    pub fn to_text(&self) -> String {
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let vals = [
            self.dataset.clone(),
            self.method.name().into(),
            self.depth.to_string(),
            self.width.to_string(),
            self.tau.to_string(),
            self.init_sigma.to_string(),
            self.wiring.name().into(),
            self.wiring_seed.to_string(),
            self.iters.to_string(),
            self.batch_size.to_string(),
            self.eval_every.to_string(),
            self.lr.to_string(),
            self.beta1.to_string(),
            self.beta2.to_string(),
            seeds.join(","),
            self.out_dir.display().to_string(),
            self.deterministic.to_string(),
            self.ste_basis.to_string(),
            self.probe_size.to_string(),
        ];
        KEYS.iter().zip(vals).map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn network_config(&self, input_dim: usize, classes: usize) -> Result<NetworkConfig> {
        let mut c = NetworkConfig::new(input_dim, self.depth, self.width, classes, self.method);
        c.tau = self.tau;
        c.init_sigma = self.init_sigma;
        c.seed = self.wiring_seed;
        c.wiring_scheme = self.wiring;
        c.validate()?;
        Ok(c)
    }

    pub fn train_options(&self, seed: u64) -> TrainOptions {
        TrainOptions {
            iters: self.iters,
            batch_size: self.batch_size,
            eval_every: self.eval_every,
            lr: self.lr,
            beta1: self.beta1,
            beta2: self.beta2,
            seed,
            basis: self.ste_basis,
            exec: if self.deterministic { Exec::Sequential } else { Exec::Parallel },
            probe_size: self.probe_size,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_protocol() {
        let c = RunConfig::default();
        assert_eq!((c.lr, c.batch_size, c.eval_every), (0.01, 512, 1000));
        assert_eq!((c.init_sigma, c.tau, c.seeds.len()), (1.0, 1.0, 3));
    }

    #[test]
    fn text_roundtrip() {
        let mut c = RunConfig::default();
        c.set("method", "walsh").unwrap_err();
        c.set("ste_basis", "affine:-0.5:1.5").unwrap();
        c.set("L", "3").unwrap();
        c.set("seeds", "4, 5").unwrap();
        c.set("tau", "0.3").unwrap();
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn unknown_key_named() {
        let e = RunConfig::parse("# comment\nlr = 0.1\nlearning_rate = 3\n").unwrap_err();
        assert!(e.to_string().contains("learning_rate"));
        assert!(RunConfig::parse("iters = many").is_err());
    }
}
