//! Little-endian binary checkpoint container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic     8 bytes  "DLGNCKPT"
//! version   u32      1
//! config    u64 length + UTF-8 run configuration text
//! seed      u64      run seed
//! dims      u64 x 4  input_dim, depth, width, classes
//! wiring    depth x width x (u32, u32)
//! params    u64 count + f32 values
//! adam      u64 t, f64 lr, beta1, beta2, eps, then m and v (f32, same count as params)
//! iter      u64
//! history   u64 count + f64 values
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::netarch::Wiring;
use crate::runconfig::RunConfig;
use crate::trainers::{AdamState, Model};

const MAGIC: &[u8; 8] = b"DLGNCKPT";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub config: RunConfig,
    pub seed: u64,
    pub model: Model,
    pub adam: AdamState,
    pub iter: u64,
    pub history: Vec<f64>,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> Reader<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        Error::format(self.path, msg)
    }
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| self.err("truncated file"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn usize(&mut self) -> Result<usize> {
        let v = self.u64()?;
        usize::try_from(v).map_err(|_| self.err("length overflow"))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn f32s(&mut self, n: usize) -> Result<Vec<f32>> {
        let len = n.checked_mul(4).ok_or_else(|| self.err("length overflow"))?;
        let bytes = self.take(len)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let cfg = &self.model.config;
        let mut b = Vec::with_capacity(64 + self.model.params.len() * 12);
        b.extend_from_slice(MAGIC);
        b.extend_from_slice(&VERSION.to_le_bytes());
        let text = self.config.to_text();
        b.extend_from_slice(&(text.len() as u64).to_le_bytes());
        b.extend_from_slice(text.as_bytes());
        b.extend_from_slice(&self.seed.to_le_bytes());
        for d in [cfg.input_dim, cfg.depth, cfg.width, cfg.classes] {
            b.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for layer in &self.model.wiring.layers {
            for &(x, y) in layer {
                b.extend_from_slice(&x.to_le_bytes());
                b.extend_from_slice(&y.to_le_bytes());
            }
        }
        let f32s = |b: &mut Vec<u8>, v: &[f32]| v.iter().for_each(|x| b.extend_from_slice(&x.to_le_bytes()));
        b.extend_from_slice(&(self.model.params.len() as u64).to_le_bytes());
        f32s(&mut b, &self.model.params);
        b.extend_from_slice(&self.adam.t.to_le_bytes());
        for x in [self.adam.lr, self.adam.beta1, self.adam.beta2, self.adam.eps] {
            b.extend_from_slice(&x.to_bits().to_le_bytes());
        }
        f32s(&mut b, &self.adam.m);
        f32s(&mut b, &self.adam.v);
        b.extend_from_slice(&self.iter.to_le_bytes());
        b.extend_from_slice(&(self.history.len() as u64).to_le_bytes());
        for h in &self.history {
            b.extend_from_slice(&h.to_bits().to_le_bytes());
        }
        b
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Checkpoint> {
        let mut r = Reader { buf: bytes, pos: 0, path };
        if r.take(8)? != MAGIC {
            return Err(r.err("not a checkpoint (bad magic)"));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(r.err(format!("unsupported checkpoint version {version}")));
        }
        let n = r.usize()?;
        let text = std::str::from_utf8(r.take(n)?).map_err(|_| r.err("config text is not UTF-8"))?;
        let config = RunConfig::parse(text)?;
        let seed = r.u64()?;
        let (input_dim, depth, width, classes) = (r.usize()?, r.usize()?, r.usize()?, r.usize()?);
        let mut layers = Vec::with_capacity(depth.min(1 << 16));
        for _ in 0..depth {
            let mut l = Vec::with_capacity(width.min(1 << 20));
            for _ in 0..width {
                l.push((r.u32()?, r.u32()?));
            }
            layers.push(l);
        }
        let np = r.usize()?;
        let params = r.f32s(np)?;
        let t = r.u64()?;
        let (lr, beta1, beta2, eps) = (r.f64()?, r.f64()?, r.f64()?, r.f64()?);
        let m = r.f32s(np)?;
        let v = r.f32s(np)?;
        let iter = r.u64()?;
        let nh = r.usize()?;
        let history = (0..nh).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        if r.pos != bytes.len() {
            return Err(r.err("trailing bytes"));
        }
        let net = config.network_config(input_dim, classes)?;
        if net.depth != depth || net.width != width {
            return Err(r.err("stored dimensions disagree with the stored configuration"));
        }
        let model = Model::from_parts(net, Wiring { input_dim, layers }, params)?;
        Ok(Checkpoint {
            config,
            seed,
            model,
            adam: AdamState {
                m,
                v,
                t,
                lr,
                beta1,
                beta2,
                eps,
            },
            iter,
            history,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        crate::fsutil::write_atomic(path, &self.to_bytes())
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes, path)
    }
}
