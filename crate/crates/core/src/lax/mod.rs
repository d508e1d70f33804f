//! Algebra-valued Lax operators and the zero-curvature engine.

mod negative;
mod positive;

#[cfg(test)]
mod tests;

pub use negative::{
    build_negative_pair, build_negative_pair_chiral, change_variables_check, change_variables_check_with, negative_eom, printed_negative_eom,
    verify_negative_hierarchy, verify_negative_with, ChangeVariablesReport, NegativeCase,
};
pub use positive::{
    mkdv_eom, mkdv_lax_pair, mkdv_lax_x, printed_mkdv_coefficients, solve_positive_hierarchy, verify_mkdv,
    verify_mkdv_with, HierarchySolution, UNKNOWNS,
};
pub(crate) use positive::linear_occurrence;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::coeff::Coeff;
use crate::loop_algebra::{bracket, principal_grade, LoopGenerator, PrincipalGrade};
use crate::rep6::{rep_term, LaurentMatrix};
use crate::ring::{Dir, EomSystem, RingError, ScalarExpr};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LaxError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("under-determined: {0}")]
    UnderDetermined(String),
    #[error("inconsistent grade equation: {0}")]
    Inconsistent(String),
}

/// `sum c_X X` with field-valued coefficients; one entry per generator, no zero entries.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<LoopGenerator, ScalarExpr>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn term(c: ScalarExpr, x: LoopGenerator) -> Self {
        let mut a = Self::zero();
        a.add_term(c, x);
        a
    }

    /// Constant coefficient 1.
    pub fn generator(x: LoopGenerator) -> Self {
        Self::term(ScalarExpr::one(), x)
    }

    pub fn add_term(&mut self, c: ScalarExpr, x: LoopGenerator) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(x).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&x);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (LoopGenerator, &ScalarExpr)> {
        self.terms.iter().map(|(g, c)| (*g, c))
    }

    pub fn coeff(&self, x: LoopGenerator) -> ScalarExpr {
        self.terms.get(&x).cloned().unwrap_or_default()
    }

    /// Applies `f` to every coefficient.
    pub fn map(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(f(c), *g);
        }
        out
    }

    pub fn try_map(
        &self,
        f: impl Fn(&ScalarExpr) -> Result<ScalarExpr, RingError>,
    ) -> Result<Self, RingError> {
        let mut out = Self::zero();
        for (g, c) in &self.terms {
            out.add_term(f(c)?, *g);
        }
        Ok(out)
    }

    /// Derivations act on coefficients only.
    pub fn derive(&self, dir: Dir) -> Self {
        self.map(|c| c.derive(dir))
    }

    pub fn normalize(&self, eom: &EomSystem) -> Result<Self, RingError> {
        self.try_map(|c| eom.normalize(c))
    }

    pub fn scale(&self, k: Coeff) -> Self {
        self.map(|c| c.scale(k))
    }

    /// Every coefficient has the grade of its generator.
    pub fn is_total_00(&self) -> bool {
        self.terms
            .iter()
            .all(|(g, c)| c.homogeneous_grade().is_some_and(|h| h == g.grade()))
    }

    /// Matrix image in the 6-dimensional representation.
    pub fn to_matrix(&self) -> LaurentMatrix {
        let mut out = LaurentMatrix::zero();
        for (g, c) in &self.terms {
            out = &out + &rep_term(c, *g);
        }
        out
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, o: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        for (g, c) in &o.terms {
            out.add_term(c.clone(), *g);
        }
        out
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, o: &AlgebraElement) -> AlgebraElement {
        self + &(-o)
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.map(|c| -c)
    }
}

impl fmt::Display for AlgebraElement {
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

/// `[[cX, dY]] = (-1)^{X.d} (c d) [X, Y]`, extended bilinearly (per monomial of `d`).
pub fn algebra_bracket(a: &AlgebraElement, b: &AlgebraElement) -> AlgebraElement {
    let mut out = AlgebraElement::zero();
    for (x, c) in a.terms() {
        for (y, d) in b.terms() {
            let br = bracket(x, y);
            if br.is_zero() {
                continue;
            }
            let mut signed = ScalarExpr::zero();
            for (m, k) in d.terms() {
                let s = Coeff::from_sign(x.grade().sign(m.grade()));
                signed.add_term(m.clone(), s * *k);
            }
            let cd = c * &signed;
            for (z, k) in br.terms() {
                out.add_term(cd.scale(k), z);
            }
        }
    }
    out
}

/// `F = d- Lp - d+ Lm + [[Lp, Lm]]`; flatness is `F = 0`.
pub fn zero_curvature(lp: &AlgebraElement, lm: &AlgebraElement, dirs: (Dir, Dir)) -> AlgebraElement {
    let (plus, minus) = dirs;
    let mut f = &lp.derive(minus) - &lm.derive(plus);
    f = &f + &algebra_bracket(lp, lm);
    f
}

/// Partition by principal grade.
pub fn grade_decompose(f: &AlgebraElement) -> BTreeMap<PrincipalGrade, AlgebraElement> {
    let mut out: BTreeMap<PrincipalGrade, AlgebraElement> = BTreeMap::new();
    for (g, c) in f.terms() {
        out.entry(principal_grade(g))
            .or_default()
            .add_term(c.clone(), g);
    }
    out
}

/// Adds `+1` to the coefficient of the `index`-th term (in canonical order).
/// Used as a soundness control for the verifiers.
pub fn mutate(e: &ScalarExpr, index: usize) -> ScalarExpr {
    let mut out = e.clone();
    if let Some((m, _)) = e.terms().nth(index) {
        out.add_term(m.clone(), Coeff::int(1));
    }
    out
}

/// Outcome of a flatness check: the normalized curvature, empty on success.
#[derive(Clone, Debug)]
pub struct FlatnessReport {
    pub name: String,
    pub residual: AlgebraElement,
}

impl FlatnessReport {
    pub fn passed(&self) -> bool {
        self.residual.is_zero()
    }
}
