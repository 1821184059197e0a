//! The 16 two-input Boolean gates as integer multilinear polynomials.
//!
//! Every gate `g: {0,1}^2 -> {0,1}` is written uniquely as
//! `g(a, b) = c0 + ca*a + cb*b + cab*a*b`. Stacking the 16 coefficient rows
//! gives the codebook `G` (16 x 4, rank 4) that every training method
//! quantizes against.
//!
//! Gates are indexed by their truth table: bit `i` of a [`GateId`] is the
//! output at corner `i`, with corners ordered `(a,b) = (0,0), (1,0), (0,1), (1,1)`.
//! FALSE is gate 0 and TRUE is gate 15.
//!
//! | id | name          | c0 | ca | cb | cab |
//! |----|---------------|----|----|----|-----|
//! |  0 | `FALSE`       |  0 |  0 |  0 |  0  |
//! |  1 | `NOR`         |  1 | -1 | -1 |  1  |
//! |  2 | `A_AND_NOT_B` |  0 |  1 |  0 | -1  |
//! |  3 | `NOT_B`       |  1 |  0 | -1 |  0  |
//! |  4 | `NOT_A_AND_B` |  0 |  0 |  1 | -1  |
//! |  5 | `NOT_A`       |  1 | -1 |  0 |  0  |
//! |  6 | `XOR`         |  0 |  1 |  1 | -2  |
//! |  7 | `NAND`        |  1 |  0 |  0 | -1  |
//! |  8 | `AND`         |  0 |  0 |  0 |  1  |
//! |  9 | `XNOR`        |  1 | -1 | -1 |  2  |
//! | 10 | `A`           |  0 |  1 |  0 |  0  |
//! | 11 | `A_OR_NOT_B`  |  1 |  0 | -1 |  1  |
//! | 12 | `B`           |  0 |  0 |  1 |  0  |
//! | 13 | `NOT_A_OR_B`  |  1 | -1 |  0 |  1  |
//! | 14 | `OR`          |  0 |  1 |  1 | -1  |
//! | 15 | `TRUE`        |  1 |  0 |  0 |  0  |

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const NUM_GATES: usize = 16;

/// Coefficient index of the constant term.
pub const C0: usize = 0;
pub const CA: usize = 1;
pub const CB: usize = 2;
/// Coefficient index of the interaction term.
pub const CAB: usize = 3;

/// Input corners in truth-table bit order.
pub const CORNERS: [(u8, u8); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

const GATE_NAMES: [&str; NUM_GATES] = [
    "FALSE",
    "NOR",
    "A_AND_NOT_B",
    "NOT_B",
    "NOT_A_AND_B",
    "NOT_A",
    "XOR",
    "NAND",
    "AND",
    "XNOR",
    "A",
    "A_OR_NOT_B",
    "B",
    "NOT_A_OR_B",
    "OR",
    "TRUE",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GateId(u8);

impl GateId {
    pub const FALSE: GateId = GateId(0);
    pub const NOR: GateId = GateId(1);
    pub const A_AND_NOT_B: GateId = GateId(2);
    pub const NOT_B: GateId = GateId(3);
    pub const NOT_A_AND_B: GateId = GateId(4);
    pub const NOT_A: GateId = GateId(5);
    pub const XOR: GateId = GateId(6);
    pub const NAND: GateId = GateId(7);
    pub const AND: GateId = GateId(8);
    pub const XNOR: GateId = GateId(9);
    pub const A: GateId = GateId(10);
    pub const A_OR_NOT_B: GateId = GateId(11);
    pub const B: GateId = GateId(12);
    pub const NOT_A_OR_B: GateId = GateId(13);
    pub const OR: GateId = GateId(14);
    pub const TRUE: GateId = GateId(15);

    /// Returns `None` for ids outside `0..16`.
    pub fn new(id: u8) -> Option<GateId> {
        (id < NUM_GATES as u8).then_some(GateId(id))
    }

    pub fn all() -> impl Iterator<Item = GateId> {
        (0..NUM_GATES as u8).map(GateId)
    }

    pub fn id(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Truth-table output at corner `i` (see [`CORNERS`]).
    pub fn bit(self, corner: usize) -> u8 {
        (self.0 >> corner) & 1
    }

    pub fn eval(self, a: bool, b: bool) -> bool {
        self.bit(a as usize | ((b as usize) << 1)) == 1
    }

    pub fn name(self) -> &'static str {
        GATE_NAMES[self.index()]
    }

    pub fn coeffs(self) -> [i8; 4] {
        CODEBOOK[self.index()]
    }

    /// Gate with every truth bit flipped.
    pub fn complement(self) -> GateId {
        GateId(!self.0 & 0x0f)
    }

    pub fn class(self) -> GateClass {
        classify(self)
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GATE_NAMES
            .iter()
            .position(|n| *n == s)
            .map(|i| GateId(i as u8))
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// Continuous multilinear coefficients `[c0, ca, cb, cab]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CoeffVec(pub [f64; 4]);

impl CoeffVec {
    pub fn new(c0: f64, ca: f64, cb: f64, cab: f64) -> Self {
        CoeffVec([c0, ca, cb, cab])
    }

    pub fn c0(&self) -> f64 {
        self.0[C0]
    }
    pub fn ca(&self) -> f64 {
        self.0[CA]
    }
    pub fn cb(&self) -> f64 {
        self.0[CB]
    }
    pub fn cab(&self) -> f64 {
        self.0[CAB]
    }

    /// `c^T psi(a, b)` with `psi = [1, a, b, ab]`.
    pub fn eval(&self, a: f64, b: f64) -> f64 {
        let c = &self.0;
        c[0] + c[1] * a + c[2] * b + c[3] * a * b
    }

    pub fn dist2(&self, other: &[f64; 4]) -> f64 {
        self.0.iter().zip(other).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl From<[i8; 4]> for CoeffVec {
    fn from(c: [i8; 4]) -> Self {
        CoeffVec(c.map(f64::from))
    }
}

/// Function values at the four corners `[s00, s10, s01, s11]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CornerVec(pub [f64; 4]);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateClass {
    Constant,
    Separable,
    WeakInteraction,
    StrongInteraction,
}

impl GateClass {
    pub const ALL: [GateClass; 4] = [
        GateClass::Constant,
        GateClass::Separable,
        GateClass::WeakInteraction,
        GateClass::StrongInteraction,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            GateClass::Constant => "constant",
            GateClass::Separable => "separable",
            GateClass::WeakInteraction => "weak_interaction",
            GateClass::StrongInteraction => "strong_interaction",
        }
    }
}

/// Coefficients from corner values by forward substitution.
const fn coeffs_from_truth(id: u8) -> [i8; 4] {
    let g00 = (id & 1) as i8;
    let g10 = ((id >> 1) & 1) as i8;
    let g01 = ((id >> 2) & 1) as i8;
    let g11 = ((id >> 3) & 1) as i8;
    [g00, g10 - g00, g01 - g00, g11 - g10 - g01 + g00]
}

const fn build_table() -> [[i8; 4]; NUM_GATES] {
    let mut rows = [[0i8; 4]; NUM_GATES];
    let mut j = 0;
    while j < NUM_GATES {
        rows[j] = coeffs_from_truth(j as u8);
        j += 1;
    }
    rows
}

/// The codebook rows, ordered by [`GateId`].
pub const CODEBOOK: [[i8; 4]; NUM_GATES] = build_table();

/// `M`: corner values to polynomial coefficients, `c = M s`.
pub const CORNER_TO_POLY: [[i8; 4]; 4] = [[1, 0, 0, 0], [-1, 1, 0, 0], [-1, 0, 1, 0], [1, -1, -1, 1]];

/// `M^-1`: polynomial coefficients to corner values, `s = M^-1 c`.
pub const POLY_TO_CORNER: [[i8; 4]; 4] = [[1, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]];

/// The 16 x 4 integer codebook. Immutable; share freely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    rows: [[i8; 4]; NUM_GATES],
}

impl Default for Codebook {
    fn default() -> Self {
        build_codebook()
    }
}

pub fn build_codebook() -> Codebook {
    Codebook {
        rows: std::array::from_fn(|j| coeffs_from_truth(j as u8)),
    }
}

impl Codebook {
    /// Builds a codebook from arbitrary rows; used for fault injection.
    pub fn from_rows(rows: [[i8; 4]; NUM_GATES]) -> Self {
        Codebook { rows }
    }

    pub fn rows(&self) -> &[[i8; 4]; NUM_GATES] {
        &self.rows
    }

    pub fn row(&self, g: GateId) -> [i8; 4] {
        self.rows[g.index()]
    }

    pub fn row_f64(&self, j: usize) -> [f64; 4] {
        self.rows[j].map(f64::from)
    }

    /// Column sums in exact integer arithmetic.
    pub fn column_sums(&self) -> [i32; 4] {
        let mut s = [0i32; 4];
        for r in &self.rows {
            for k in 0..4 {
                s[k] += i32::from(r[k]);
            }
        }
        s
    }

    /// Rank over the rationals, by fraction-free Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<[i64; 4]> = self.rows.iter().map(|r| r.map(i64::from)).collect();
        let mut rank = 0;
        for col in 0..4 {
            let Some(p) = (rank..m.len()).find(|&i| m[i][col] != 0) else {
                continue;
            };
            m.swap(rank, p);
            let pivot = m[rank];
            for i in 0..m.len() {
                if i != rank && m[i][col] != 0 {
                    let f = m[i][col];
                    for k in 0..4 {
                        m[i][k] = m[i][k] * pivot[col] - pivot[k] * f;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Whether row `j`, evaluated at each corner, reproduces the truth bits of `j`.
    pub fn row_reproduces_truth_table(&self, j: usize) -> bool {
        let c = CoeffVec::from(self.rows[j]);
        CORNERS.iter().enumerate().all(|(i, &(a, b))| {
            c.eval(f64::from(a), f64::from(b)) == f64::from(((j >> i) & 1) as u8)
        })
    }

    /// Nearest row in squared Euclidean distance, smallest id on ties.
    pub fn snap(&self, c: &CoeffVec) -> Result<(GateId, CoeffVec)> {
        if !c.is_finite() {
            return Err(Error::NonFinite(c.0));
        }
        let j = self.nearest(&c.0);
        Ok((GateId(j as u8), CoeffVec::from(self.rows[j])))
    }

    /// Index of the nearest row. Non-finite input compares as NaN and falls
    /// through to row 0; use [`Codebook::snap`] when validation matters.
    pub fn nearest(&self, c: &[f64; 4]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (j, r) in self.rows.iter().enumerate() {
            let d: f64 = (0..4)
                .map(|k| {
                    let e = c[k] - f64::from(r[k]);
                    e * e
                })
                .sum();
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        best
    }

    /// Squared distances to all 16 rows.
    pub fn distances2(&self, c: &[f64; 4]) -> [f64; NUM_GATES] {
        std::array::from_fn(|j| {
            (0..4)
                .map(|k| {
                    let e = c[k] - f64::from(self.rows[j][k]);
                    e * e
                })
                .sum()
        })
    }
}

/// Process-wide shared codebook.
pub fn codebook() -> &'static Codebook {
    static CB: Codebook = Codebook { rows: CODEBOOK };
    &CB
}

pub fn snap(c: &CoeffVec) -> Result<(GateId, CoeffVec)> {
    codebook().snap(c)
}

fn matvec(m: &[[i8; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    std::array::from_fn(|i| (0..4).map(|k| f64::from(m[i][k]) * v[k]).sum())
}

pub fn corner_to_poly(s: &CornerVec) -> CoeffVec {
    CoeffVec(matvec(&CORNER_TO_POLY, &s.0))
}

pub fn poly_to_corner(c: &CoeffVec) -> CornerVec {
    CornerVec(matvec(&POLY_TO_CORNER, &c.0))
}

pub fn classify(g: GateId) -> GateClass {
    let [_, ca, cb, cab] = g.coeffs();
    match cab.abs() {
        0 if ca == 0 && cb == 0 => GateClass::Constant,
        0 => GateClass::Separable,
        1 => GateClass::WeakInteraction,
        _ => GateClass::StrongInteraction,
    }
}

pub fn complement(g: GateId) -> GateId {
    g.complement()
}

/// Canonical monomial basis `psi(a, b) = [1, a, b, ab]`.
#[inline]
pub fn psi(a: f64, b: f64) -> [f64; 4] {
    [1.0, a, b, a * b]
}

/// One-hot corner basis `phi(a, b)`, the corner-parameterization analogue of [`psi`].
#[inline]
pub fn phi(a: f64, b: f64) -> [f64; 4] {
    [(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_rows() {
        let cb = build_codebook();
        assert_eq!(cb.row(GateId::AND), [0, 0, 0, 1]);
        assert_eq!(cb.row(GateId::FALSE), [0, 0, 0, 0]);
        assert_eq!(cb.row(GateId::XOR), [0, 1, 1, -2]);
        assert_eq!(cb.row(GateId::OR), [0, 1, 1, -1]);
        assert_eq!(cb.row(GateId::A), [0, 1, 0, 0]);
        assert_eq!(cb.rows(), &CODEBOOK);
    }

    #[test]
    fn structure() {
        let cb = build_codebook();
        assert_eq!(cb.rank(), 4);
        assert_eq!(cb.column_sums(), [8, 0, 0, 0]);
        for j in 0..NUM_GATES {
            assert!(cb.row_reproduces_truth_table(j));
            let [c0, ca, cb_, cab] = cb.rows()[j];
            assert!((0..=1).contains(&c0));
            assert!((-1..=1).contains(&ca) && (-1..=1).contains(&cb_));
            assert!((-2..=2).contains(&cab));
        }
    }

    #[test]
    fn snap_examples() {
        let (g, c) = snap(&CoeffVec::new(0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(g, GateId::AND);
        assert_eq!(c.0, [0.0, 0.0, 0.0, 1.0]);
        // FALSE and TRUE are both at distance^2 0.25.
        assert_eq!(snap(&CoeffVec::new(0.5, 0.0, 0.0, 0.0)).unwrap().0, GateId::FALSE);
        assert!(snap(&CoeffVec::new(f64::NAN, 0.0, 0.0, 0.0)).is_err());
        assert!(snap(&CoeffVec::new(0.0, f64::INFINITY, 0.0, 0.0)).is_err());
    }

    #[test]
    fn bijection() {
        let c = corner_to_poly(&CornerVec([0.0, 0.0, 0.0, 1.0]));
        assert_eq!(c.0, [0.0, 0.0, 0.0, 1.0]);
        let c = corner_to_poly(&CornerVec([1.0; 4]));
        assert_eq!(c.0, [1.0, 0.0, 0.0, 0.0]);
        for i in 0..4 {
            for j in 0..4 {
                let p: i32 = (0..4)
                    .map(|k| i32::from(CORNER_TO_POLY[i][k]) * i32::from(POLY_TO_CORNER[k][j]))
                    .sum();
                assert_eq!(p, i32::from(i == j));
            }
        }
    }

    #[test]
    fn classes() {
        assert_eq!(classify(GateId::TRUE), GateClass::Constant);
        assert_eq!(classify(GateId::XOR), GateClass::StrongInteraction);
        assert_eq!(classify(GateId::OR), GateClass::WeakInteraction);
        assert_eq!(classify(GateId::B), GateClass::Separable);
        let mut counts = [0; 4];
        for g in GateId::all() {
            counts[classify(g).index()] += 1;
        }
        assert_eq!(counts, [2, 4, 8, 2]);
    }

    #[test]
    fn complements() {
        assert_eq!(complement(GateId::AND), GateId::NAND);
        assert_eq!(GateId::NAND.coeffs(), [1, 0, 0, -1]);
        assert_eq!(complement(GateId::FALSE), GateId::TRUE);
        for g in GateId::all() {
            let h = complement(g);
            assert_eq!(complement(h), g);
            let (c, d) = (g.coeffs(), h.coeffs());
            assert_eq!(d, [1 - c[0], -c[1], -c[2], -c[3]]);
        }
    }

    #[test]
    fn names_round_trip() {
        for g in GateId::all() {
            assert_eq!(g.name().parse::<GateId>().unwrap(), g);
        }
        assert!("AMD".parse::<GateId>().is_err());
    }

    #[test]
    fn eval_matches_bits() {
        assert!(GateId::AND.eval(true, true));
        assert!(!GateId::AND.eval(true, false));
        assert!(GateId::A_AND_NOT_B.eval(true, false));
        assert!(!GateId::A_AND_NOT_B.eval(false, true));
    }
}
