//! Network topology and method-independent forward machinery.

mod config;
mod forward;
mod layer;
mod wiring;

pub use config::{Method, NetworkConfig, WiringScheme};
pub(crate) use forward::check_batch;
pub use forward::{accuracy, argmax_rows, forward, predict, Mode};
pub(crate) use layer::eval_layer_into;
pub use layer::{eval_layer, group_sum, logistic, Activations, Batch, Squash, ROW_CHUNK};
pub use wiring::{build_wiring, stride_pairs, Pair, Wiring};
