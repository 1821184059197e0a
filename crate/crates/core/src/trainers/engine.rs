//! Batched forward and backward passes shared by every method.
//!
//! Each method is reduced, once per minibatch, to a [`LayerPlan`]: per-neuron
//! forward coefficients in the polynomial basis, an output squashing, the basis
//! in which per-sample parameter gradients accumulate, and whatever per-neuron
//! state maps the accumulated vector to raw-parameter gradients.

use rand::RngCore;

use super::basis::BasisSpec;
use super::covjac::{covjac_effective, covjac_jacobian, mat_vec, Mat4};
use super::gumbel::gumbel_st_forward;
use super::iwp::{iwp_free_corners, iwp_ste_corners, sigmoid};
use super::model::{logits, quad, Model};
use super::softmix::{logit_grad, softmix_effective, Weights};
use crate::codebook::{codebook, corner_to_poly, phi, CoeffVec, CornerVec, POLY_TO_CORNER};
use crate::error::Result;
use crate::exec::Exec;
use crate::netarch::{eval_layer_into, Activations, Method, Pair, Squash, ROW_CHUNK};

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Accum {
    Poly(BasisSpec),
    Corner,
}

impl Accum {
    #[inline]
    fn eval(self, a: f64, b: f64) -> [f64; 4] {
        match self {
            Accum::Poly(s) => s.eval(a, b),
            Accum::Corner => phi(a, b),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Aux {
    Identity,
    Probs(Vec<Weights>),
    Jacobian(Vec<Mat4>),
    SigmoidSlope(Vec<[f64; 4]>),
}

#[derive(Clone, Debug)]
pub(crate) struct LayerPlan {
    pub coeffs: Vec<[f32; 4]>,
    pub squash: Squash,
    pub accum: Accum,
    pub aux: Aux,
}

fn to_f32(c: [f64; 4]) -> [f32; 4] {
    c.map(|x| x as f32)
}

/// Per-minibatch effective quantities of one layer.
pub(crate) fn plan_layer(model: &Model, layer: usize, basis: BasisSpec, rng: &mut dyn RngCore) -> Result<LayerPlan> {
    let k = model.config.width;
    let tau = model.config.tau;
    let mut coeffs = Vec::with_capacity(k);
    let (squash, accum, aux) = match model.method() {
        Method::SoftMix => {
            let mut probs = Vec::with_capacity(k);
            for n in 0..k {
                let (pi, c) = softmix_effective(&logits(model.neuron_params(layer, n)));
                coeffs.push(to_f32(c));
                probs.push(pi);
            }
            (Squash::Identity, Accum::Poly(BasisSpec::Canonical), Aux::Probs(probs))
        }
        Method::GumbelSt => {
            let mut probs = Vec::with_capacity(k);
            for n in 0..k {
                let (gate, p) = gumbel_st_forward(&logits(model.neuron_params(layer, n)), rng);
                coeffs.push(gate.coeffs().map(f32::from));
                probs.push(p);
            }
            (Squash::Identity, Accum::Poly(BasisSpec::Canonical), Aux::Probs(probs))
        }
        Method::MultilinearSte => {
            for n in 0..k {
                let (_, c) = codebook().snap(&CoeffVec(quad(model.neuron_params(layer, n))))?;
                coeffs.push(to_f32(c.0));
            }
            (Squash::Identity, Accum::Poly(basis), Aux::Identity)
        }
        Method::MultilinearCovJac => {
            let mut jac = Vec::with_capacity(k);
            for n in 0..k {
                let (w, c) = covjac_effective(&quad(model.neuron_params(layer, n)), tau);
                coeffs.push(to_f32(c));
                jac.push(covjac_jacobian(&w, tau));
            }
            (Squash::Identity, Accum::Poly(BasisSpec::Canonical), Aux::Jacobian(jac))
        }
        Method::IwpFree => {
            let mut slope = Vec::with_capacity(k);
            for n in 0..k {
                let raw = quad(model.neuron_params(layer, n));
                let s = iwp_free_corners(&raw);
                coeffs.push(to_f32(corner_to_poly(&CornerVec(s)).0));
                slope.push(raw.map(|r| {
                    let s = sigmoid(r);
                    s * (1.0 - s)
                }));
            }
            (Squash::Identity, Accum::Corner, Aux::SigmoidSlope(slope))
        }
        Method::IwpSte => {
            for n in 0..k {
                let s = iwp_ste_corners(&quad(model.neuron_params(layer, n)));
                coeffs.push(to_f32(corner_to_poly(&CornerVec(s)).0));
            }
            (Squash::Identity, Accum::Corner, Aux::Identity)
        }
        Method::MultilinearFree => {
            for n in 0..k {
                coeffs.push(to_f32(quad(model.neuron_params(layer, n))));
            }
            (Squash::Logistic, Accum::Poly(BasisSpec::Canonical), Aux::Identity)
        }
    };
    Ok(LayerPlan {
        coeffs,
        squash,
        accum,
        aux,
    })
}

/// Plan whose coefficients are the deployed gates' codebook rows.
pub(crate) fn hard_plan(model: &Model, layer: usize) -> Result<LayerPlan> {
    let coeffs = (0..model.config.width)
        .map(|n| Ok(model.gate(layer, n)?.coeffs().map(f32::from)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LayerPlan {
        coeffs,
        squash: Squash::Identity,
        accum: Accum::Poly(BasisSpec::Canonical),
        aux: Aux::Identity,
    })
}

/// Runs the layer stack. Returns activations of every layer.
pub(crate) fn forward_plans(
    model: &Model,
    plans: &[LayerPlan],
    features: &[f32],
    rows: usize,
    exec: Exec,
) -> Activations {
    let k = model.config.width;
    let mut layers: Vec<Vec<f32>> = Vec::with_capacity(plans.len());
    for (l, plan) in plans.iter().enumerate() {
        let (input, in_w) = match layers.last() {
            Some(prev) => (prev.as_slice(), k),
            None => (features, model.config.input_dim),
        };
        let mut out = vec![0.0f32; rows * k];
        eval_layer_into(&plan.coeffs, plan.squash, input, in_w, &model.wiring.layers[l], &mut out, exec);
        layers.push(out);
    }
    Activations { rows, layers }
}

/// Accumulates per-neuron `sum_r delta_u * basis(a, b)` over all rows and,
/// when `d_input` is given, writes `dL/dinput` (`rows x in_w`).
#[allow(clippy::too_many_arguments)]
pub(crate) fn backward_layer(
    plan: &LayerPlan,
    pairs: &[Pair],
    input: &[f32],
    in_w: usize,
    output: &[f32],
    delta: &[f32],
    d_input: Option<&mut [f32]>,
    exec: Exec,
) -> Vec<[f64; 4]> {
    let k = pairs.len();
    let rows = delta.len() / k;
    let logistic = plan.squash == Squash::Logistic;
    let body = |row0: usize, nrows: usize, mut dx: Option<&mut [f32]>| {
        let mut acc = vec![[0.0f64; 4]; k];
        if let Some(d) = dx.as_deref_mut() {
            d.fill(0.0);
        }
        for r in 0..nrows {
            let row = row0 + r;
            let x = &input[row * in_w..(row + 1) * in_w];
            let dr = &delta[row * k..(row + 1) * k];
            for n in 0..k {
                let mut du = dr[n];
                if du == 0.0 {
                    continue;
                }
                if logistic {
                    let z = output[row * k + n];
                    du *= z * (1.0 - z);
                }
                let (i0, i1) = (pairs[n].0 as usize, pairs[n].1 as usize);
                let (a, b) = (x[i0], x[i1]);
                let v = plan.accum.eval(a as f64, b as f64);
                let du64 = du as f64;
                for q in 0..4 {
                    acc[n][q] += du64 * v[q];
                }
                if let Some(d) = dx.as_deref_mut() {
                    let c = &plan.coeffs[n];
                    d[r * in_w + i0] += du * (c[1] + c[3] * b);
                    d[r * in_w + i1] += du * (c[2] + c[3] * a);
                }
            }
        }
        acc
    };
    let partials = match d_input {
        Some(dx) => exec.map_chunks_mut(dx, ROW_CHUNK * in_w, |ci, chunk| {
            body(ci * ROW_CHUNK, chunk.len() / in_w, Some(chunk))
        }),
        None => exec.map_range(rows, ROW_CHUNK, |range| body(range.start, range.len(), None)),
    };
    let mut total = vec![[0.0f64; 4]; k];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            for q in 0..4 {
                t[q] += p[q];
            }
        }
    }
    total
}

/// Maps an accumulated per-neuron vector to raw-parameter gradients (written
/// into `out`) and returns the gradient in polynomial-coefficient space used
/// by the coverage-ratio diagnostic.
pub(crate) fn raw_grads(plan: &LayerPlan, n: usize, g: &[f64; 4], out: &mut [f32]) -> [f64; 4] {
    match (&plan.aux, plan.accum) {
        (Aux::Probs(p), _) => {
            let dl = logit_grad(&p[n], g);
            for (o, d) in out.iter_mut().zip(dl) {
                *o = d as f32;
            }
            *g
        }
        (Aux::Jacobian(j), _) => {
            let d = mat_vec(&j[n], g);
            for (o, x) in out.iter_mut().zip(d) {
                *o = x as f32;
            }
            d
        }
        (aux, Accum::Corner) => {
            for q in 0..4 {
                out[q] = match aux {
                    Aux::SigmoidSlope(s) => (g[q] * s[n][q]) as f32,
                    _ => g[q] as f32,
                };
            }
            // sum delta * psi = M^{-T} (sum delta * phi)
            std::array::from_fn(|p| (0..4).map(|q| POLY_TO_CORNER[q][p] as f64 * g[q]).sum())
        }
        (_, Accum::Poly(_)) => {
            for q in 0..4 {
                out[q] = g[q] as f32;
            }
            *g
        }
    }
}

/// Loss and gradients of one minibatch.
pub(crate) struct StepGrads {
    pub loss: f64,
    pub grads: Vec<f32>,
    /// Per layer, per neuron gradient in coefficient space.
    pub coeff_grads: Vec<Vec<[f64; 4]>>,
}

/// Mean cross-entropy and its gradient w.r.t. every raw parameter.
pub(crate) fn loss_and_grads(
    model: &Model,
    plans: &[LayerPlan],
    features: &[f32],
    labels: &[u32],
    exec: Exec,
) -> Result<StepGrads> {
    let cfg = &model.config;
    let (k, classes, depth) = (cfg.width, cfg.classes, cfg.depth);
    let rows = labels.len();
    let acts = forward_plans(model, plans, features, rows, exec);
    let group = k / classes;
    let mut delta = vec![0.0f32; rows * k];
    let mut loss = 0.0;
    let scale = 1.0 / rows as f64;
    for r in 0..rows {
        let out = &acts.last()[r * k..(r + 1) * k];
        let logits: Vec<f64> = out.chunks(group).map(|g| g.iter().map(|&x| x as f64).sum()).collect();
        let (l, dl) = super::loss::cross_entropy(&logits, labels[r] as usize);
        loss += l;
        for (n, d) in delta[r * k..(r + 1) * k].iter_mut().enumerate() {
            *d = (dl[n / group] * scale) as f32;
        }
    }
    loss *= scale;

    let ppl = cfg.params_per_layer();
    let ppn = cfg.method.params_per_neuron();
    let mut grads = vec![0.0f32; cfg.num_params()];
    let mut coeff_grads = vec![Vec::new(); depth];
    for l in (0..depth).rev() {
        let (input, in_w) = if l == 0 {
            (features, cfg.input_dim)
        } else {
            (acts.layers[l - 1].as_slice(), k)
        };
        let mut d_prev = if l > 0 { Some(vec![0.0f32; rows * k]) } else { None };
        let acc = backward_layer(
            &plans[l],
            &model.wiring.layers[l],
            input,
            in_w,
            &acts.layers[l],
            &delta,
            d_prev.as_deref_mut(),
            exec,
        );
        let lg = &mut grads[l * ppl..(l + 1) * ppl];
        coeff_grads[l] = acc
            .iter()
            .enumerate()
            .map(|(n, g)| raw_grads(&plans[l], n, g, &mut lg[n * ppn..(n + 1) * ppn]))
            .collect();
        if let Some(d) = d_prev {
            delta = d;
        }
    }
    Ok(StepGrads {
        loss,
        grads,
        coeff_grads,
    })
}
