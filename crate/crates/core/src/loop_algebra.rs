//! The loop extension of graded osp(1|2): generators, bracket, derivations and gradations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::grading::Grade;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Family {
    K0,
    #[serde(rename = "K+")]
    Kp,
    #[serde(rename = "K-")]
    Km,
    L0,
    #[serde(rename = "L+")]
    Lp,
    #[serde(rename = "L-")]
    Lm,
    #[serde(rename = "P+")]
    Pp,
    #[serde(rename = "P-")]
    Pm,
    #[serde(rename = "Q+")]
    Qp,
    #[serde(rename = "Q-")]
    Qm,
}

use Family::*;

impl Family {
    pub const ALL: [Family; 10] = [K0, Kp, Km, L0, Lp, Lm, Pp, Pm, Qp, Qm];

    pub fn grade(self) -> Grade {
        match self {
            K0 | Kp | Km => Grade::G00,
            L0 | Lp | Lm => Grade::G11,
            Pp | Pm => Grade::G10,
            Qp | Qm => Grade::G01,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            K0 => "K0",
            Kp => "K+",
            Km => "K-",
            L0 => "L0",
            Lp => "L+",
            Lm => "L-",
            Pp => "P+",
            Pm => "P-",
            Qp => "Q+",
            Qm => "Q-",
        }
    }

    /// LaTeX stem and superscript, e.g. `("K", "+")`.
    pub fn latex_parts(self) -> (&'static str, &'static str) {
        let s = self.symbol();
        let sup = match &s[1..] {
            "0" => "0",
            "+" => "+",
            _ => "-",
        };
        (&s[..1], sup)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct LoopGenerator {
    pub family: Family,
    pub mode: i64,
}

impl LoopGenerator {
    pub const fn new(family: Family, mode: i64) -> Self {
        LoopGenerator { family, mode }
    }

    pub fn grade(self) -> Grade {
        self.family.grade()
    }

    /// All generators with `|mode| <= window`.
    pub fn window(window: i64) -> Vec<LoopGenerator> {
        (-window..=window)
            .flat_map(|m| Family::ALL.iter().map(move |&f| LoopGenerator::new(f, m)))
            .collect()
    }
}

impl fmt::Display for LoopGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family, self.mode)
    }
}

/// Twice a half-integer, so `PrincipalGrade(1)` is 1/2.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PrincipalGrade(pub i64);

impl PrincipalGrade {
    pub fn twice(self) -> i64 {
        self.0
    }
}

impl std::ops::Add for PrincipalGrade {
    type Output = PrincipalGrade;
    fn add(self, o: PrincipalGrade) -> PrincipalGrade {
        PrincipalGrade(self.0 + o.0)
    }
}

impl fmt::Display for PrincipalGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Linear combination of loop generators with constant coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct BracketResult {
    terms: BTreeMap<LoopGenerator, Coeff>,
}

impl BracketResult {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(c: Coeff, g: LoopGenerator) -> Self {
        let mut r = Self::zero();
        r.add(c, g);
        r
    }

    pub fn add(&mut self, c: Coeff, g: LoopGenerator) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(g).or_insert_with(Coeff::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&g);
        }
    }

    pub fn add_scaled(&mut self, c: Coeff, other: &BracketResult) {
        for (g, d) in &other.terms {
            self.add(c * *d, *g);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (LoopGenerator, Coeff)> + '_ {
        self.terms.iter().map(|(g, c)| (*g, *c))
    }

    pub fn coeff(&self, g: LoopGenerator) -> Coeff {
        self.terms.get(&g).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for BracketResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (g, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c}) {g}")?;
        }
        Ok(())
    }
}

/// The non-vanishing relations, one orientation per pair.
pub const TABLE: &[(Family, Family, (i128, i128), Family)] = &[
    // g[0] sector
    (K0, Kp, (2, 0), Kp),
    (K0, Km, (-2, 0), Km),
    (Kp, Km, (1, 0), K0),
    (L0, Lp, (2, 0), Kp),
    (L0, Lm, (-2, 0), Km),
    (Lp, Lm, (1, 0), K0),
    (K0, Lp, (2, 0), Lp),
    (K0, Lm, (-2, 0), Lm),
    (Kp, Lm, (1, 0), L0),
    (Km, Lp, (-1, 0), L0),
    (L0, Kp, (2, 0), Lp),
    (L0, Km, (-2, 0), Lm),
    // g[0] with g[1]
    (K0, Pp, (1, 0), Pp),
    (K0, Pm, (-1, 0), Pm),
    (Kp, Pm, (-1, 0), Pp),
    (Km, Pp, (-1, 0), Pm),
    (K0, Qp, (1, 0), Qp),
    (K0, Qm, (-1, 0), Qm),
    (Kp, Qm, (-1, 0), Qp),
    (Km, Qp, (-1, 0), Qm),
    (L0, Pp, (0, 1), Qp),
    (L0, Pm, (0, -1), Qm),
    (Lm, Pp, (0, -1), Qm),
    (Lp, Pm, (0, -1), Qp),
    (L0, Qp, (0, -1), Pp),
    (L0, Qm, (0, 1), Pm),
    (Lm, Qp, (0, 1), Pm),
    (Lp, Qm, (0, 1), Pp),
    // g[1] sector
    (Pp, Pp, (2, 0), Kp),
    (Pm, Pm, (-2, 0), Km),
    (Pp, Pm, (1, 0), K0),
    (Pp, Qp, (0, 2), Lp),
    (Pm, Qm, (0, -2), Lm),
    (Pp, Qm, (0, 1), L0),
    (Pm, Qp, (0, 1), L0),
    (Qp, Qp, (2, 0), Kp),
    (Qm, Qm, (-2, 0), Km),
    (Qp, Qm, (1, 0), K0),
];

fn lookup(a: Family, b: Family) -> Option<(Coeff, Family)> {
    TABLE
        .iter()
        .find(|(x, y, _, _)| *x == a && *y == b)
        .map(|(_, _, (re, im), r)| {
            (
                Coeff::from_parts((*re).into(), (*im).into()),
                *r,
            )
        })
}

/// Graded bracket of two generators; modes add.
pub fn bracket(x: LoopGenerator, y: LoopGenerator) -> BracketResult {
    let mode = x.mode + y.mode;
    if let Some((c, r)) = lookup(x.family, y.family) {
        return BracketResult::single(c, LoopGenerator::new(r, mode));
    }
    if let Some((c, r)) = lookup(y.family, x.family) {
        let s = Coeff::from_sign(-x.grade().sign(y.grade()));
        return BracketResult::single(s * c, LoopGenerator::new(r, mode));
    }
    BracketResult::zero()
}

/// Bilinear extension of [`bracket`] to constant combinations.
pub fn bracket_lin(a: &BracketResult, b: &BracketResult) -> BracketResult {
    let mut out = BracketResult::zero();
    for (x, c) in a.terms() {
        for (y, d) in b.terms() {
            out.add_scaled(c * d, &bracket(x, y));
        }
    }
    out
}

fn bracket_gen_lin(x: LoopGenerator, b: &BracketResult) -> BracketResult {
    bracket_lin(&BracketResult::single(Coeff::from(1), x), b)
}

/// The graded Jacobi sum for a triple.
pub fn jacobi_sum(a: LoopGenerator, b: LoopGenerator, c: LoopGenerator) -> BracketResult {
    let (ga, gb, gc) = (a.grade(), b.grade(), c.grade());
    let mut out = BracketResult::zero();
    out.add_scaled(
        Coeff::from_sign(ga.sign(gc)),
        &bracket_gen_lin(a, &bracket(b, c)),
    );
    out.add_scaled(
        Coeff::from_sign(gb.sign(ga)),
        &bracket_gen_lin(b, &bracket(c, a)),
    );
    out.add_scaled(
        Coeff::from_sign(gc.sign(gb)),
        &bracket_gen_lin(c, &bracket(a, b)),
    );
    out
}

pub fn jacobi_check(a: LoopGenerator, b: LoopGenerator, c: LoopGenerator) -> bool {
    jacobi_sum(a, b, c).is_zero()
}

/// All triples in the window violating Jacobi.
pub fn jacobi_sweep(window: i64) -> (usize, Vec<(LoopGenerator, LoopGenerator, LoopGenerator)>) {
    let gens = LoopGenerator::window(window);
    let n = gens.len();
    let failures: Vec<_> = (0..n * n)
        .into_par_iter()
        .flat_map_iter(|ij| {
            let (a, b) = (gens[ij / n], gens[ij % n]);
            gens.iter()
                .filter(move |&&c| !jacobi_check(a, b, c))
                .map(move |&c| (a, b, c))
        })
        .collect();
    (n * n * n, failures)
}

/// All pairs in the window violating graded antisymmetry.
pub fn antisymmetry_sweep(window: i64) -> Vec<(LoopGenerator, LoopGenerator)> {
    let gens = LoopGenerator::window(window);
    let mut bad = Vec::new();
    for &x in &gens {
        for &y in &gens {
            let mut sum = bracket(x, y);
            sum.add_scaled(Coeff::from_sign(x.grade().sign(y.grade())), &bracket(y, x));
            if !sum.is_zero() {
                bad.push((x, y));
            }
        }
    }
    bad
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Derivation {
    D00,
    D11,
}

impl Derivation {
    pub fn grade(self) -> Grade {
        match self {
            Derivation::D00 => Grade::G00,
            Derivation::D11 => Grade::G11,
        }
    }
}

/// Action of `d00` or `d11` on a generator.
pub fn derivation_act(d: Derivation, x: LoopGenerator) -> BracketResult {
    let m = x.mode as i128;
    match d {
        Derivation::D00 => BracketResult::single(Coeff::int(m), x),
        Derivation::D11 => {
            let (c, fam) = match x.family {
                K0 => (Coeff::int(m), L0),
                L0 => (Coeff::int(m), K0),
                Kp => (Coeff::int(m), Lp),
                Km => (Coeff::int(m), Lm),
                Lp => (Coeff::int(m), Kp),
                Lm => (Coeff::int(m), Km),
                Pp => (Coeff::imag(m), Qp),
                Pm => (Coeff::imag(m), Qm),
                Qp => (Coeff::imag(-m), Pp),
                Qm => (Coeff::imag(-m), Pm),
            };
            BracketResult::single(c, LoopGenerator::new(fam, x.mode))
        }
    }
}

pub fn derivation_lin(d: Derivation, a: &BracketResult) -> BracketResult {
    let mut out = BracketResult::zero();
    for (x, c) in a.terms() {
        out.add_scaled(c, &derivation_act(d, x));
    }
    out
}

/// Pairs in the window where `d` fails the graded Leibniz rule.
pub fn derivation_sweep(d: Derivation, window: i64) -> Vec<(LoopGenerator, LoopGenerator)> {
    let gens = LoopGenerator::window(window);
    let one = |x| BracketResult::single(Coeff::int(1), x);
    let mut bad = Vec::new();
    for &x in &gens {
        for &y in &gens {
            let lhs = derivation_lin(d, &bracket(x, y));
            let mut rhs = bracket_lin(&derivation_act(d, x), &one(y));
            rhs.add_scaled(
                Coeff::from_sign(d.grade().sign(x.grade())),
                &bracket_lin(&one(x), &derivation_act(d, y)),
            );
            if lhs != rhs {
                bad.push((x, y));
            }
        }
    }
    bad
}

/// Principal grade from the action of `G = K0_0 / 2 + 2 d00`.
pub fn principal_grade(x: LoopGenerator) -> PrincipalGrade {
    let m = x.mode;
    PrincipalGrade(match x.family {
        K0 | L0 => 4 * m,
        Pp | Qp => 4 * m + 1,
        Pm | Qm => 4 * m - 1,
        Kp | Lp => 4 * m + 2,
        Km | Lm => 4 * m - 2,
    })
}

/// Map from the principal to the homogeneous gradation: the new mode is twice the principal grade.
pub fn hom_f(x: LoopGenerator) -> LoopGenerator {
    LoopGenerator::new(x.family, principal_grade(x).twice())
}

pub fn hom_f_lin(a: &BracketResult) -> BracketResult {
    let mut out = BracketResult::zero();
    for (x, c) in a.terms() {
        out.add(c, hom_f(x));
    }
    out
}

/// One row of the structure-constant dump: `[left_m, right_n] = coeff * result_{m+n}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StructureConstant {
    pub left: Family,
    pub right: Family,
    pub mode_offset: i64,
    pub coeff: Coeff,
    pub result: Family,
}

/// Every non-vanishing ordered pair, including those completed by antisymmetry.
pub fn structure_constants() -> Vec<StructureConstant> {
    let mut out = Vec::new();
    for &a in &Family::ALL {
        for &b in &Family::ALL {
            let r = bracket(LoopGenerator::new(a, 0), LoopGenerator::new(b, 0));
            for (g, c) in r.terms() {
                out.push(StructureConstant {
                    left: a,
                    right: b,
                    mode_offset: g.mode,
                    coeff: c,
                    result: g.family,
                });
            }
        }
    }
    out
}

fn latex_gen(f: Family, mode: &str) -> String {
    let (stem, sup) = f.latex_parts();
    format!("{stem}^{{{sup}}}_{{{mode}}}")
}

/// LaTeX rendering of the one-sided table, grouped by sector.
pub fn latex_table() -> String {
    let mut s = String::from("\\begin{align*}\n");
    for (a, b, (re, im), r) in TABLE {
        let c = Coeff::from_parts((*re).into(), (*im).into());
        let odd = a.grade().dot(b.grade()) == 1;
        let (open, close) = if odd { ("\\{", "\\}") } else { ("[", "]") };
        let coeff = match c.to_string().as_str() {
            "1" => String::new(),
            "-1" => "-".to_string(),
            other => other.to_string(),
        };
        s.push_str(&format!(
            "{open}{}, {}{close} &= {coeff}{} \\\\\n",
            latex_gen(*a, "m"),
            latex_gen(*b, "n"),
            latex_gen(*r, "m+n")
        ));
    }
    s.push_str("\\end{align*}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(f: Family, m: i64) -> LoopGenerator {
        LoopGenerator::new(f, m)
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(bracket(g(K0, 1), g(Kp, 2)), BracketResult::single(Coeff::int(2), g(Kp, 3)));
        assert_eq!(bracket(g(Pp, 0), g(Qm, 0)), BracketResult::single(Coeff::i(), g(L0, 0)));
        assert!(bracket(g(K0, 0), g(K0, 5)).is_zero());
        // Completed by antisymmetry: {Q-, P+} = {P+, Q-} since [01].[10] = 0 gives a commutator.
        assert_eq!(bracket(g(Qm, 0), g(Pp, 0)), BracketResult::single(-Coeff::i(), g(L0, 0)));
    }

    #[test]
    fn table_is_one_sided_and_graded() {
        for (a, b, _, r) in TABLE {
            if a != b {
                assert!(lookup(*b, *a).is_none(), "{a} {b} listed twice");
            }
            assert_eq!(a.grade() + b.grade(), r.grade());
        }
    }

    #[test]
    fn jacobi_examples() {
        assert!(jacobi_check(g(Pp, 0), g(Pm, 0), g(Qp, 0)));
        assert!(jacobi_check(g(K0, 0), g(Kp, 0), g(Km, 0)));
        assert!(jacobi_check(g(K0, 0), g(K0, 1), g(K0, -1)));
    }

    #[test]
    fn jacobi_small_window() {
        let (_, bad) = jacobi_sweep(1);
        assert!(bad.is_empty(), "{:?}", &bad[..bad.len().min(5)]);
    }

    #[test]
    fn antisymmetry_window() {
        assert!(antisymmetry_sweep(4).is_empty());
    }

    #[test]
    fn derivation_examples() {
        assert_eq!(derivation_act(Derivation::D00, g(Pp, 3)), BracketResult::single(Coeff::int(3), g(Pp, 3)));
        assert_eq!(derivation_act(Derivation::D11, g(Kp, 2)), BracketResult::single(Coeff::int(2), g(Lp, 2)));
        assert_eq!(derivation_act(Derivation::D11, g(Qp, 1)), BracketResult::single(-Coeff::i(), g(Pp, 1)));
    }

    #[test]
    fn derivations_are_derivations() {
        let gens = LoopGenerator::window(2);
        for d in [Derivation::D00, Derivation::D11] {
            for &x in &gens {
                for &y in &gens {
                    let lhs = derivation_lin(d, &bracket(x, y));
                    let mut rhs = bracket_lin(&derivation_act(d, x), &BracketResult::single(Coeff::from(1), y));
                    rhs.add_scaled(
                        Coeff::from_sign(d.grade().sign(x.grade())),
                        &bracket_lin(&BracketResult::single(Coeff::from(1), x), &derivation_act(d, y)),
                    );
                    assert_eq!(lhs, rhs, "{d:?} on {x}, {y}");
                }
            }
        }
    }

    #[test]
    fn derivations_commute() {
        for x in LoopGenerator::window(3) {
            let a = derivation_lin(Derivation::D11, &derivation_act(Derivation::D00, x));
            let b = derivation_lin(Derivation::D00, &derivation_act(Derivation::D11, x));
            assert_eq!(a, b);
        }
    }

    #[test]
    fn principal_grade_examples() {
        assert_eq!(principal_grade(g(Pp, 0)), PrincipalGrade(1));
        assert_eq!(principal_grade(g(Km, 1)), PrincipalGrade(2));
        assert_eq!(principal_grade(g(L0, 0)), PrincipalGrade(0));
        assert_eq!(PrincipalGrade(1).to_string(), "1/2");
    }

    #[test]
    fn grading_operator_matches_principal_grade() {
        // [G, X] = p(X) X with G = K0_0 / 2 + 2 d00.
        for x in LoopGenerator::window(3) {
            let mut act = bracket(g(K0, 0), x);
            act = {
                let mut r = BracketResult::zero();
                r.add_scaled(Coeff::frac(1, 2), &act);
                r.add_scaled(Coeff::int(2), &derivation_act(Derivation::D00, x));
                r
            };
            let p = principal_grade(x).twice();
            assert_eq!(act, BracketResult::single(Coeff::frac(p as i128, 2), x), "{x}");
        }
    }

    #[test]
    fn brackets_respect_gradings() {
        let gens = LoopGenerator::window(3);
        for &x in &gens {
            for &y in &gens {
                for (z, _) in bracket(x, y).terms() {
                    assert_eq!(z.grade(), x.grade() + y.grade());
                    assert_eq!(principal_grade(z), principal_grade(x) + principal_grade(y));
                }
            }
        }
    }

    #[test]
    fn hom_f_examples_and_compatibility() {
        assert_eq!(hom_f(g(K0, 1)), g(K0, 4));
        assert_eq!(hom_f(g(Pm, 0)), g(Pm, -1));
        assert_eq!(hom_f(g(Km, 1)), g(Km, 2));
        let gens = LoopGenerator::window(3);
        for &x in &gens {
            for &y in &gens {
                let lhs = hom_f_lin(&bracket(x, y));
                let rhs = bracket(hom_f(x), hom_f(y));
                assert_eq!(lhs, rhs, "{x} {y}");
            }
        }
    }

    #[test]
    fn structure_constants_json_round_trip() {
        let sc = structure_constants();
        assert_eq!(sc.len(), 2 * TABLE.len() - 4);
        let s = serde_json::to_string(&sc).unwrap();
        let back: Vec<StructureConstant> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, sc);
    }
}
