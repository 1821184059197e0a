//! Deep logic gate networks over the 16-gate multilinear codebook.

pub mod codebook;
pub mod error;
pub mod exec;
pub mod netarch;
pub mod rng;
pub mod trainers;

pub use error::{Error, Result};
pub use exec::Exec;
pub mod circuit;
pub mod diagnostics;
pub mod data;
pub mod fsutil;
pub mod checkpoint;
pub mod runconfig;
pub mod verify;
