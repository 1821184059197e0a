use std::fs;
use std::io::Write;
use std::path::Path;

use super::HardCircuit;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::netarch::Batch;

pub type Word = u64;
const LANES: usize = Word::BITS as usize;
/// Words evaluated per work item.
const WORD_CHUNK: usize = 8;

/// Binary features packed column-wise: `LANES` samples per word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedBits {
    pub rows: usize,
    pub dim: usize,
    /// `dim x words` words, column-major.
    pub words: Vec<Word>,
}

impl PackedBits {
    pub fn words_per_column(&self) -> usize {
        self.rows.div_ceil(LANES)
    }

    /// Packs a dense `rows x dim` matrix; nonzero entries become 1.
    pub fn pack(features: &[f32], dim: usize) -> PackedBits {
        let rows = if dim == 0 { 0 } else { features.len() / dim };
        let wpc = rows.div_ceil(LANES);
        let mut words = vec![0 as Word; dim * wpc];
        for r in 0..rows {
            let (w, bit) = (r / LANES, r % LANES);
            for f in 0..dim {
                if features[r * dim + f] != 0.0 {
                    words[f * wpc + w] |= 1 << bit;
                }
            }
        }
        PackedBits { rows, dim, words }
    }

    pub fn from_batch(batch: &Batch) -> PackedBits {
        Self::pack(&batch.features, batch.dim)
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        let wpc = self.words_per_column();
        (self.words[col * wpc + row / LANES] >> (row % LANES)) & 1 == 1
    }
}

#[inline]
fn gate_word(id: u8, a: Word, b: Word) -> Word {
    let t = |i: u8| -> Word { ((id >> i) & 1) as Word * Word::MAX };
    (t(0) & !a & !b) | (t(1) & a & !b) | (t(2) & !a & b) | (t(3) & a & b)
}

/// Bit-sliced per-lane counter: `planes[p]` holds bit `p` of every lane's count.
fn add_lanes(planes: &mut [Word], mut carry: Word) {
    for p in planes {
        let next = *p & carry;
        *p ^= carry;
        carry = next;
        if carry == 0 {
            break;
        }
    }
}

fn eval_word(circuit: &HardCircuit, packed: &PackedBits, w: usize, buf: &mut [Vec<Word>; 2]) -> Vec<u32> {
    let wpc = packed.words_per_column();
    let k = circuit.width();
    let (prev, next) = buf.split_at_mut(1);
    let (prev, next) = (&mut prev[0], &mut next[0]);
    for (l, layer) in circuit.layers.iter().enumerate() {
        next.clear();
        for g in layer {
            let (a, b) = if l == 0 {
                (packed.words[g.in0 as usize * wpc + w], packed.words[g.in1 as usize * wpc + w])
            } else {
                (prev[g.in0 as usize], prev[g.in1 as usize])
            };
            next.push(gate_word(g.gate.id(), a, b));
        }
        std::mem::swap(prev, next);
    }
    let group = k / circuit.classes;
    let nplanes = (usize::BITS - group.leading_zeros()) as usize;
    let lanes = (packed.rows - w * LANES).min(LANES);
    let mut best = vec![0u32; lanes];
    let mut best_count = vec![0u32; lanes];
    let mut planes = vec![0 as Word; nplanes];
    for c in 0..circuit.classes {
        planes.iter_mut().for_each(|p| *p = 0);
        for &x in &prev[c * group..(c + 1) * group] {
            add_lanes(&mut planes, x);
        }
        for lane in 0..lanes {
            let count = planes
                .iter()
                .enumerate()
                .map(|(p, &pl)| (((pl >> lane) & 1) as u32) << p)
                .sum::<u32>();
            if c == 0 || count > best_count[lane] {
                best_count[lane] = count;
                best[lane] = c as u32;
            }
        }
    }
    best
}

/// Class predictions for every packed row.
pub fn eval_packed(circuit: &HardCircuit, packed: &PackedBits, exec: Exec) -> Result<Vec<u32>> {
    circuit.validate()?;
    if packed.dim != circuit.input_dim {
        return Err(Error::Dimension {
            what: "packed input width vs circuit input_dim",
            expected: circuit.input_dim,
            got: packed.dim,
        });
    }
    let parts = exec.map_range(packed.words_per_column(), WORD_CHUNK, |range| {
        let mut buf = [Vec::new(), Vec::new()];
        let mut out = Vec::with_capacity(range.len() * LANES);
        for w in range {
            out.extend(eval_word(circuit, packed, w, &mut buf));
        }
        out
    });
    Ok(parts.concat())
}

/// Writes `sample_index,predicted_class` rows.
pub fn write_predictions(path: &Path, predictions: &[u32]) -> Result<()> {
    let mut text = Vec::with_capacity(predictions.len() * 8 + 32);
    writeln!(text, "sample_index,predicted_class").expect("in-memory write");
    for (i, p) in predictions.iter().enumerate() {
        writeln!(text, "{i},{p}").expect("in-memory write");
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::GateId;

    #[test]
    fn gate_words() {
        let (a, b) = (0b1100, 0b1010);
        assert_eq!(gate_word(GateId::AND.id(), a, b) & 0xF, 0b1000);
        assert_eq!(gate_word(GateId::XOR.id(), a, b) & 0xF, 0b0110);
        assert_eq!(gate_word(GateId::FALSE.id(), a, b), 0);
        assert_eq!(gate_word(GateId::TRUE.id(), a, b), Word::MAX);
    }

    #[test]
    fn lane_counter() {
        let mut planes = vec![0; 3];
        for x in [0b101, 0b100, 0b111, 0b001, 0b100] {
            add_lanes(&mut planes, x);
        }
        let count = |lane: usize| (0..3).map(|p| ((planes[p] >> lane) & 1) << p).sum::<u64>();
        assert_eq!((count(0), count(1), count(2)), (3, 1, 4));
    }

    #[test]
    fn pack_roundtrip() {
        let feats: Vec<f32> = (0..70 * 3).map(|i| ((i * 7) % 3 == 0) as u8 as f32).collect();
        let p = PackedBits::pack(&feats, 3);
        assert_eq!(p.rows, 70);
        assert_eq!(p.words_per_column(), 2);
        for r in 0..70 {
            for c in 0..3 {
                assert_eq!(p.get(r, c), feats[r * 3 + c] == 1.0);
            }
        }
    }
}
