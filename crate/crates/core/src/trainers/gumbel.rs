//! Gumbel-ST: one Gumbel-max gate sample per neuron per minibatch, with a
//! temperature-1 straight-through backward.

use rand::RngCore;

use super::softmix::{softmax, Weights};
use crate::codebook::{GateId, NUM_GATES};

/// Draws `-ln(-ln u)` with `u` strictly inside `(0, 1)`.
pub fn sample_gumbel<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    -(-u.ln()).ln()
}

/// Index of the largest entry; earliest index wins ties.
pub fn argmax(x: &Weights) -> GateId {
    let mut best = 0;
    for j in 1..NUM_GATES {
        if x[j] > x[best] {
            best = j;
        }
    }
    GateId::new(best as u8).expect("index < 16")
}

/// Returns the selected gate and `softmax(logits + noise)`.
pub fn gumbel_st_forward<R: RngCore + ?Sized>(logits: &Weights, rng: &mut R) -> (GateId, Weights) {
    let mut perturbed = *logits;
    for p in &mut perturbed {
        *p += sample_gumbel(rng);
    }
    (argmax(&perturbed), softmax(&perturbed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    #[test]
    fn dominant_logit_always_wins() {
        let mut rng = stream(3, Purpose::Test, 0);
        let mut l = [0.0; 16];
        l[GateId::XOR.index()] = 1e6;
        for _ in 0..200 {
            assert_eq!(gumbel_st_forward(&l, &mut rng).0, GateId::XOR);
        }
    }

    #[test]
    fn gumbel_max_frequencies_uniform() {
        let mut rng = stream(11, Purpose::Test, 1);
        let mut counts = [0usize; 16];
        let n = 10_000;
        for _ in 0..n {
            counts[gumbel_st_forward(&[0.0; 16], &mut rng).0.index()] += 1;
        }
        for c in counts {
            assert!((c as f64 / n as f64 - 1.0 / 16.0).abs() < 0.01, "{counts:?}");
        }
    }
}
