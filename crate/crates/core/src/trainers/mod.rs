//! Gate-selection training mechanisms, losses and the optimizer.

mod adam;
mod basis;
mod covjac;
pub(crate) mod engine;
mod gumbel;
mod iwp;
mod loss;
mod model;
mod softmix;
mod ste;

pub use adam::AdamState;
pub use basis::{basis_metrics, BasisMetrics, BasisSpec};
pub use covjac::{covjac_backward, covjac_effective, covjac_jacobian, Mat4};
pub use gumbel::{argmax, gumbel_st_forward, sample_gumbel};
pub use iwp::{
    corner_gate, iwp_free_backward, iwp_free_corners, iwp_forward, iwp_ste_backward, iwp_ste_corners,
    mfree_backward, mfree_forward, sigmoid, sign_gate,
};
pub use loss::cross_entropy;
pub use model::Model;
pub use softmix::{input_grad, logit_grad, mix_coeffs, softmax, softmix_backward, softmix_effective, Weights};
pub use ste::{ste_backward, ste_effective};
mod train;
pub use train::{probe_batch, train, RunResult, TrainOptions, Trainer};
