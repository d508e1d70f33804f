//! The six-dimensional graded representation and Laurent-matrix arithmetic.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use crate::coeff::Coeff;
use crate::fields::{f, BIG_U00, BIG_U11, SIGMA01, SIGMA10};
use crate::grading::Grade;
use crate::loop_algebra::{bracket, Family, LoopGenerator};
use crate::ring::ScalarExpr;

pub const DIM: usize = 6;

/// Grades of the basis vectors, read off the explicit matrices.
pub const ROW_GRADES: [Grade; DIM] = [
    Grade::G00,
    Grade::G00,
    Grade::G11,
    Grade::G11,
    Grade::G10,
    Grade::G01,
];

/// Laurent polynomial in the spectral parameter: power of lambda to coefficient.
pub type Laurent = BTreeMap<i64, ScalarExpr>;

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct LaurentMatrix {
    entries: [[Laurent; DIM]; DIM],
}

fn add_into(l: &mut Laurent, power: i64, e: ScalarExpr) {
    if e.is_zero() {
        return;
    }
    let slot = l.entry(power).or_default();
    *slot += e;
    if slot.is_zero() {
        l.remove(&power);
    }
}

impl LaurentMatrix {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.add_at(i, i, 0, ScalarExpr::one());
        }
        m
    }

    /// Adds `lambda^power * e` to entry `(i, j)` (zero-based).
    pub fn add_at(&mut self, i: usize, j: usize, power: i64, e: ScalarExpr) {
        add_into(&mut self.entries[i][j], power, e);
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent {
        &self.entries[i][j]
    }

    /// Coefficient of `lambda^power` in entry `(i, j)`.
    pub fn coeff(&self, i: usize, j: usize, power: i64) -> ScalarExpr {
        self.entries[i][j].get(&power).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(BTreeMap::is_empty)
    }

    pub fn scale(&self, c: Coeff) -> Self {
        let mut out = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                for (p, e) in &self.entries[i][j] {
                    out.add_at(i, j, *p, e.scale(c));
                }
            }
        }
        out
    }

    /// Multiplies every entry by `lambda^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        let mut out = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                for (p, e) in &self.entries[i][j] {
                    out.add_at(i, j, p + shift, e.clone());
                }
            }
        }
        out
    }

    /// Applies `op` to every scalar coefficient.
    pub fn map(&self, op: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                for (p, e) in &self.entries[i][j] {
                    out.add_at(i, j, *p, op(e));
                }
            }
        }
        out
    }

    /// Lowest and highest lambda powers present.
    pub fn support(&self) -> Option<(i64, i64)> {
        let powers: Vec<i64> = self
            .entries
            .iter()
            .flatten()
            .flat_map(|l| l.keys().copied())
            .collect();
        Some((*powers.iter().min()?, *powers.iter().max()?))
    }

    pub fn entries(&self) -> &[[Laurent; DIM]; DIM] {
        &self.entries
    }
}

impl Add for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn add(self, o: &LaurentMatrix) -> LaurentMatrix {
        let mut out = self.clone();
        for i in 0..DIM {
            for j in 0..DIM {
                for (p, e) in &o.entries[i][j] {
                    out.add_at(i, j, *p, e.clone());
                }
            }
        }
        out
    }
}

impl Neg for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn neg(self) -> LaurentMatrix {
        self.scale(-Coeff::one())
    }
}

impl Sub for &LaurentMatrix {
    type Output = LaurentMatrix;
    fn sub(self, o: &LaurentMatrix) -> LaurentMatrix {
        self + &(-o)
    }
}

impl Mul for &LaurentMatrix {
    type Output = LaurentMatrix;
    /// Ordinary matrix product; scalar factors keep the order `A_ik B_kj`.
    fn mul(self, o: &LaurentMatrix) -> LaurentMatrix {
        let mut out = LaurentMatrix::zero();
        for i in 0..DIM {
            for k in 0..DIM {
                if self.entries[i][k].is_empty() {
                    continue;
                }
                for j in 0..DIM {
                    for (p, a) in &self.entries[i][k] {
                        for (q, b) in &o.entries[k][j] {
                            out.add_at(i, j, p + q, a * b);
                        }
                    }
                }
            }
        }
        out
    }
}

/// `AB - (-1)^{a.b} BA`.
pub fn matrix_graded_bracket(a: &LaurentMatrix, ga: Grade, b: &LaurentMatrix, gb: Grade) -> LaurentMatrix {
    let ab = a * b;
    let ba = b * a;
    &ab - &ba.scale(Coeff::from_sign(ga.sign(gb)))
}

type Block = [[i128; 2]; 2];

const S3: Block = [[1, 0], [0, -1]];
const SP: Block = [[0, 1], [0, 0]];
const SM: Block = [[0, 0], [1, 0]];
const S11: Block = [[1, 0], [0, 0]];
const S22: Block = [[0, 0], [0, 1]];

/// A 3x3 block matrix entry: a Pauli-type block times a Gaussian-integer scalar.
type BlockEntry = Option<(Block, (i128, i128))>;

fn from_blocks(blocks: [[BlockEntry; 3]; 3]) -> LaurentMatrix {
    let mut m = LaurentMatrix::zero();
    for (bi, row) in blocks.iter().enumerate() {
        for (bj, entry) in row.iter().enumerate() {
            let Some((b, (re, im))) = entry else { continue };
            for r in 0..2 {
                for c in 0..2 {
                    if b[r][c] != 0 {
                        let coeff = Coeff::from_parts((*re).into(), (*im).into()) * Coeff::int(b[r][c]);
                        m.add_at(2 * bi + r, 2 * bj + c, 0, ScalarExpr::constant(coeff));
                    }
                }
            }
        }
    }
    m
}

const ONE: (i128, i128) = (1, 0);
const M_ONE: (i128, i128) = (-1, 0);
const I: (i128, i128) = (0, 1);
const M_I: (i128, i128) = (0, -1);

/// The mode-zero matrix of a family.
pub fn rep_matrix0(family: Family) -> LaurentMatrix {
    use Family::*;
    match family {
        K0 => {
            let mut m = LaurentMatrix::zero();
            for (i, d) in [1, -1, 1, -1].iter().enumerate() {
                m.add_at(i, i, 0, ScalarExpr::int(*d));
            }
            m
        }
        Kp => from_blocks([[Some((SP, ONE)), None, None], [None, Some((SP, ONE)), None], [None, None, None]]),
        Km => from_blocks([[Some((SM, ONE)), None, None], [None, Some((SM, ONE)), None], [None, None, None]]),
        L0 => from_blocks([[None, Some((S3, ONE)), None], [Some((S3, ONE)), None, None], [None, None, None]]),
        Lp => from_blocks([[None, Some((SP, ONE)), None], [Some((SP, ONE)), None, None], [None, None, None]]),
        Lm => from_blocks([[None, Some((SM, ONE)), None], [Some((SM, ONE)), None, None], [None, None, None]]),
        // The printed third block row lacks its last entry; it is zero.
        Pp => from_blocks([
            [None, None, Some((S11, ONE))],
            [None, None, Some((SP, I))],
            [Some((SP, ONE)), Some((S22, M_I)), None],
        ]),
        Pm => from_blocks([
            [None, None, Some((SM, M_ONE))],
            [None, None, Some((S22, M_I))],
            [Some((S11, ONE)), Some((SM, M_I)), None],
        ]),
        Qp => from_blocks([
            [None, None, Some((SP, ONE))],
            [None, None, Some((S11, M_I))],
            [Some((S22, ONE)), Some((SP, I)), None],
        ]),
        Qm => from_blocks([
            [None, None, Some((S22, M_ONE))],
            [None, None, Some((SM, I))],
            [Some((SM, ONE)), Some((S11, I)), None],
        ]),
    }
}

/// `rep(X_m) = rep(X_0) lambda^m`.
pub fn rep_matrix(x: LoopGenerator) -> LaurentMatrix {
    rep_matrix0(x.family).shift(x.mode)
}

/// Representation of `c X` for a homogeneous coefficient `c`: row `i` picks up
/// `(-1)^{c.g_i}` so that products of such matrices follow the graded bracket.
pub fn rep_term(c: &ScalarExpr, x: LoopGenerator) -> LaurentMatrix {
    let mut out = LaurentMatrix::zero();
    let base = rep_matrix(x);
    for (m, k) in c.terms() {
        let g = m.grade();
        let term = ScalarExpr::from_monomial(m.clone(), *k);
        for i in 0..DIM {
            let sign = Coeff::from_sign(g.sign(ROW_GRADES[i]));
            for j in 0..DIM {
                for (p, e) in base.get(i, j) {
                    out.add_at(i, j, *p, (&term * e).scale(sign));
                }
            }
        }
    }
    out
}

/// Representation of a constant combination of generators.
pub fn rep_lin(a: &crate::loop_algebra::BracketResult) -> LaurentMatrix {
    let mut out = LaurentMatrix::zero();
    for (g, c) in a.terms() {
        out = &out + &rep_matrix(g).scale(c);
    }
    out
}

#[derive(Clone, Debug)]
pub struct RepMismatch {
    pub left: LoopGenerator,
    pub right: LoopGenerator,
}

#[derive(Clone, Debug)]
pub struct RepReport {
    pub pairs_checked: usize,
    pub mismatches: Vec<RepMismatch>,
}

impl RepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares matrix graded brackets with the algebra bracket on all pairs in the window.
pub fn verify_rep(mode_window: i64) -> RepReport {
    use rayon::prelude::*;
    let gens = LoopGenerator::window(mode_window);
    let mats: Vec<LaurentMatrix> = gens.iter().map(|g| rep_matrix(*g)).collect();
    let n = gens.len();
    let mismatches: Vec<RepMismatch> = (0..n * n)
        .into_par_iter()
        .filter_map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let (x, y) = (gens[i], gens[j]);
            let lhs = matrix_graded_bracket(&mats[i], x.grade(), &mats[j], y.grade());
            let rhs = rep_lin(&bracket(x, y));
            (lhs != rhs).then_some(RepMismatch { left: x, right: y })
        })
        .collect();
    RepReport {
        pairs_checked: n * n,
        mismatches,
    }
}

/// The KdV Lax matrix in the homogeneous gradation, entered as printed.
pub fn lax_matrix_kdv() -> LaurentMatrix {
    let mut m = LaurentMatrix::zero();
    let i = Coeff::i();
    let one = ScalarExpr::one();
    let (u0, u1, s10, s01) = (f(BIG_U00), f(BIG_U11), f(SIGMA10), f(SIGMA01));
    // row 1
    m.add_at(0, 1, 2, one.clone());
    m.add_at(0, 1, -2, u0.clone());
    m.add_at(0, 3, -2, u1.clone());
    m.add_at(0, 4, 1, s10.clone());
    m.add_at(0, 5, 1, s01.clone());
    // row 2
    m.add_at(1, 0, 2, one.clone());
    // row 3
    m.add_at(2, 1, -2, u1);
    m.add_at(2, 3, 2, one.clone());
    m.add_at(2, 3, -2, u0);
    m.add_at(2, 4, 1, s01.scale(i));
    m.add_at(2, 5, 1, s10.scale(-i));
    // row 4
    m.add_at(3, 2, 2, one);
    // row 5
    m.add_at(4, 1, 1, -s10.clone());
    m.add_at(4, 3, 1, s01.scale(i));
    // row 6
    m.add_at(5, 1, 1, -s01);
    m.add_at(5, 3, 1, s10.scale(-i));
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_algebra::{hom_f, Family::*};

    fn g(f: Family, m: i64) -> LoopGenerator {
        LoopGenerator::new(f, m)
    }

    #[test]
    fn rep_examples() {
        let k0 = rep_matrix(g(K0, 0));
        for (i, d) in [1, -1, 1, -1, 0, 0].iter().enumerate() {
            assert_eq!(k0.coeff(i, i, 0), ScalarExpr::int(*d));
        }
        let kp3 = rep_matrix(g(Kp, 3));
        assert_eq!(kp3.coeff(0, 1, 3), ScalarExpr::one());
        assert_eq!(kp3.coeff(2, 3, 3), ScalarExpr::one());
        assert_eq!(kp3.support(), Some((3, 3)));
        let l0 = rep_matrix(g(L0, 0));
        assert_eq!(l0.coeff(0, 2, 0), ScalarExpr::one());
        assert_eq!(l0.coeff(3, 1, 0), -ScalarExpr::one());
    }

    #[test]
    fn graded_bracket_examples() {
        let qp = rep_matrix(g(Qp, 0));
        let qm = rep_matrix(g(Qm, 0));
        assert_eq!(matrix_graded_bracket(&qp, Grade::G01, &qm, Grade::G01), rep_matrix(g(K0, 0)));
        let k0 = rep_matrix(g(K0, 0));
        let kp = rep_matrix(g(Kp, 0));
        assert_eq!(matrix_graded_bracket(&k0, Grade::G00, &kp, Grade::G00), kp.scale(Coeff::int(2)));
        let pp = rep_matrix(g(Pp, 0));
        assert_eq!(matrix_graded_bracket(&pp, Grade::G10, &pp, Grade::G10), (&pp * &pp).scale(Coeff::int(2)));
    }

    #[test]
    fn verify_rep_small_windows() {
        let r = verify_rep(2);
        let shown: Vec<String> = r.mismatches.iter().take(8).map(|m| format!("{} {}", m.left, m.right)).collect();
        assert!(r.passed(), "{shown:?}");
        assert!(verify_rep(0).passed());
    }

    #[test]
    fn kdv_matrix_is_the_rep_of_the_lax_operator() {
        let terms = [
            (f(BIG_U00), g(Kp, -2)),
            (f(BIG_U11), g(Lp, -2)),
            (f(SIGMA10), g(Pp, 1)),
            (f(SIGMA01), g(Qp, 1)),
            (ScalarExpr::one(), g(Kp, 2)),
            (ScalarExpr::one(), g(Km, 2)),
        ];
        let mut m = LaurentMatrix::zero();
        for (c, x) in &terms {
            m = &m + &rep_term(c, *x);
        }
        assert_eq!(m, lax_matrix_kdv());
        assert_eq!(lax_matrix_kdv().coeff(1, 0, 2), ScalarExpr::one());
        assert_eq!(lax_matrix_kdv().coeff(0, 3, -2), f(BIG_U11));
        assert_eq!(lax_matrix_kdv().coeff(4, 3, 1), f(SIGMA01).scale(Coeff::i()));
    }

    #[test]
    fn hom_f_is_a_relabeling() {
        for x in LoopGenerator::window(2) {
            let fx = hom_f(x);
            assert_eq!(rep_matrix(fx), rep_matrix(x).shift(fx.mode - x.mode));
        }
    }
}
