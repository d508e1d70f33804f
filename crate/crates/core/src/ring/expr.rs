use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::generator::{Dir, Field, Freq, Generator};
use crate::coeff::Coeff;
use crate::grading::Grade;

/// Sorted product of generators with multiplicities.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<(Generator, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn grade(&self) -> Grade {
        self.0
            .iter()
            .fold(Grade::G00, |acc, (g, m)| acc + g.grade().times(*m))
    }

    pub fn factors(&self) -> &[(Generator, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, m)| m).sum()
    }
}

/// Element of the graded differential ring in canonical form.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ScalarExpr {
    terms: BTreeMap<Monomial, Coeff>,
}

/// Merges two sorted monomials, tracking the reordering sign.
/// Returns `None` when an odd generator would be repeated.
fn merge(a: &[(Generator, u32)], b: &[(Generator, u32)]) -> Option<(bool, Vec<(Generator, u32)>)> {
    let mut suffix = vec![Grade::G00; a.len() + 1];
    for i in (0..a.len()).rev() {
        suffix[i] = suffix[i + 1] + a[i].0.grade().times(a[i].1);
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut negative = false;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                let gb = b[j].0.grade().times(b[j].1);
                if suffix[i].dot(gb) == 1 {
                    negative = !negative;
                }
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let g = a[i].0.grade();
                if g.is_odd() {
                    return None;
                }
                if suffix[i + 1].dot(g.times(b[j].1)) == 1 {
                    negative = !negative;
                }
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    if j < b.len() {
        out.extend_from_slice(&b[j..]);
    } else {
        out.extend_from_slice(&a[i..]);
    }
    Some((negative, out))
}

fn needs_linearizing(m: &[(Generator, u32)]) -> bool {
    let mut prev: Option<Field> = None;
    for (g, mult) in m {
        if g.is_transcendental() {
            if *mult > 1 || prev == g.field() {
                return true;
            }
            prev = g.field();
        }
    }
    false
}

type Hyp = Option<(bool, Freq)>;

fn push_hyp(out: &mut BTreeMap<Hyp, Coeff>, c: Coeff, sinh: bool, k: Freq) {
    let zero = Freq::zero();
    let (c, k) = if k < zero {
        (if sinh { -c } else { c }, -k)
    } else {
        (c, k)
    };
    if k == zero {
        if !sinh {
            *out.entry(None).or_insert_with(Coeff::zero) += c;
        }
        return;
    }
    *out.entry(Some((sinh, k))).or_insert_with(Coeff::zero) += c;
}

fn hyp_times(current: BTreeMap<Hyp, Coeff>, sinh_b: bool, b: Freq) -> BTreeMap<Hyp, Coeff> {
    let half = Coeff::frac(1, 2);
    let mut out = BTreeMap::new();
    for (h, c) in current {
        match h {
            None => push_hyp(&mut out, c, sinh_b, b),
            Some((sinh_a, a)) => {
                let c = c * half;
                match (sinh_a, sinh_b) {
                    (false, false) => {
                        push_hyp(&mut out, c, false, a + b);
                        push_hyp(&mut out, c, false, a - b);
                    }
                    (false, true) => {
                        push_hyp(&mut out, c, true, a + b);
                        push_hyp(&mut out, -c, true, a - b);
                    }
                    (true, false) => {
                        push_hyp(&mut out, c, true, a + b);
                        push_hyp(&mut out, c, true, a - b);
                    }
                    (true, true) => {
                        push_hyp(&mut out, c, false, a + b);
                        push_hyp(&mut out, -c, false, a - b);
                    }
                }
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Rewrites products of transcendentals of one field into linear combinations.
/// Everything inside a field block commutes, so no signs arise.
fn linearize(m: Vec<(Generator, u32)>) -> Vec<(Coeff, Vec<(Generator, u32)>)> {
    let mut base = Vec::new();
    let mut groups: BTreeMap<Field, Vec<(Generator, u32)>> = BTreeMap::new();
    for (g, mult) in m {
        match g.field() {
            Some(f) if g.is_transcendental() => groups.entry(f).or_default().push((g, mult)),
            _ => base.push((g, mult)),
        }
    }
    let mut acc: Vec<(Coeff, Vec<(Generator, u32)>)> = vec![(Coeff::one(), Vec::new())];
    for (field, items) in groups {
        let mut exp_sum = Freq::zero();
        let mut hyp: BTreeMap<Hyp, Coeff> = BTreeMap::from([(None, Coeff::one())]);
        for (g, mult) in items {
            match g {
                Generator::Exp { k, .. } => exp_sum += k * Freq::from_integer(mult as i32),
                Generator::Cosh { k, .. } => {
                    for _ in 0..mult {
                        hyp = hyp_times(hyp, false, k);
                    }
                }
                Generator::Sinh { k, .. } => {
                    for _ in 0..mult {
                        hyp = hyp_times(hyp, true, k);
                    }
                }
                _ => unreachable!("non-transcendental generator in transcendental group"),
            }
        }
        let mut next = Vec::new();
        for (c0, gens0) in &acc {
            for (h, c) in &hyp {
                let mut gens = gens0.clone();
                if !exp_sum.is_zero() {
                    gens.push((Generator::Exp { field, k: exp_sum }, 1));
                }
                match h {
                    None => {}
                    Some((false, k)) => gens.push((Generator::Cosh { field, k: *k }, 1)),
                    Some((true, k)) => gens.push((Generator::Sinh { field, k: *k }, 1)),
                }
                next.push((*c0 * *c, gens));
            }
        }
        acc = next;
    }
    acc.into_iter()
        .map(|(c, gens)| {
            let mut all = base.clone();
            all.extend(gens);
            all.sort_by(|x, y| x.0.cmp(&y.0));
            (c, all)
        })
        .collect()
}

/// Product of two monomials as a list of (coefficient, monomial).
pub fn multiply_monomials(a: &Monomial, b: &Monomial) -> Vec<(Coeff, Monomial)> {
    let Some((negative, merged)) = merge(&a.0, &b.0) else {
        return Vec::new();
    };
    let sign = if negative { -Coeff::one() } else { Coeff::one() };
    if needs_linearizing(&merged) {
        linearize(merged)
            .into_iter()
            .map(|(c, m)| (c * sign, Monomial(m)))
            .collect()
    } else {
        vec![(sign, Monomial(merged))]
    }
}

impl ScalarExpr {
    pub fn zero() -> Self {
        ScalarExpr::default()
    }

    pub fn one() -> Self {
        ScalarExpr::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        let mut e = ScalarExpr::zero();
        e.add_term(Monomial::one(), c);
        e
    }

    pub fn int(n: i128) -> Self {
        ScalarExpr::constant(Coeff::int(n))
    }

    pub fn from_generator(g: Generator) -> Self {
        ScalarExpr::from_monomial(Monomial(vec![(g, 1)]), Coeff::one())
    }

    /// `c * m` for a monomial already in canonical order.
    pub fn from_monomial(m: Monomial, c: Coeff) -> Self {
        let mut e = ScalarExpr::zero();
        e.add_term(m, c);
        e
    }

    pub fn field(f: Field) -> Self {
        ScalarExpr::jet(f, 0, 0)
    }

    pub fn jet(f: Field, dx: u16, dt: u16) -> Self {
        ScalarExpr::from_generator(Generator::jet(f, dx, dt))
    }

    /// First derivative of `f` in direction `dir`.
    pub fn jet_dir(f: Field, dir: Dir) -> Self {
        match dir {
            Dir::Plus => ScalarExpr::jet(f, 1, 0),
            Dir::Minus => ScalarExpr::jet(f, 0, 1),
        }
    }

    /// Chiral symbol `f(x-)`, annihilated by `d+`.
    pub fn chiral(f: Field) -> Self {
        ScalarExpr::from_generator(Generator::Chiral { field: f, dt: 0 })
    }

    /// `exp(k f)` for a `[00]` field.
    pub fn exp(f: Field, k: Freq) -> Self {
        assert_eq!(f.grade(), Grade::G00, "exp requires a [00] field");
        if k.is_zero() {
            return ScalarExpr::one();
        }
        ScalarExpr::from_generator(Generator::Exp { field: f, k })
    }

    /// `cosh(k f)`; expanded into exponentials for a `[00]` field.
    pub fn cosh(f: Field, k: Freq) -> Self {
        if f.grade() == Grade::G00 {
            return (ScalarExpr::exp(f, k) + ScalarExpr::exp(f, -k)).scale(Coeff::frac(1, 2));
        }
        assert_eq!(f.grade(), Grade::G11, "cosh requires an even field");
        if k.is_zero() {
            return ScalarExpr::one();
        }
        let k = if k < Freq::zero() { -k } else { k };
        ScalarExpr::from_generator(Generator::Cosh { field: f, k })
    }

    /// `sinh(k f)`; expanded into exponentials for a `[00]` field.
    pub fn sinh(f: Field, k: Freq) -> Self {
        if f.grade() == Grade::G00 {
            return (ScalarExpr::exp(f, k) - ScalarExpr::exp(f, -k)).scale(Coeff::frac(1, 2));
        }
        assert_eq!(f.grade(), Grade::G11, "sinh requires an even field");
        if k.is_zero() {
            return ScalarExpr::zero();
        }
        if k < Freq::zero() {
            return -ScalarExpr::from_generator(Generator::Sinh { field: f, k: -k });
        }
        ScalarExpr::from_generator(Generator::Sinh { field: f, k })
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coeff)> {
        self.terms.into_iter()
    }

    pub fn coeff_of(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).copied().unwrap_or_else(Coeff::zero)
    }

    /// The coefficient if `self` is a constant, `None` otherwise.
    pub fn as_constant(&self) -> Option<Coeff> {
        match self.terms.len() {
            0 => Some(Coeff::zero()),
            1 => self.terms.get(&Monomial::one()).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, c: Coeff) -> Self {
        if c.is_zero() {
            return ScalarExpr::zero();
        }
        ScalarExpr {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), *d * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = ScalarExpr::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Grade shared by every term, or `None` for mixed or zero expressions.
    pub fn homogeneous_grade(&self) -> Option<Grade> {
        let mut it = self.terms.keys().map(Monomial::grade);
        let first = it.next()?;
        it.all(|g| g == first).then_some(first)
    }

    /// The terms of a given total grade.
    pub fn grade_part(&self, g: Grade) -> Self {
        ScalarExpr {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.grade() == g)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn derive(&self, dir: Dir) -> Self {
        let mut out = ScalarExpr::zero();
        for (m, c) in &self.terms {
            for (idx, (g, mult)) in m.0.iter().enumerate() {
                let dg = g.derive(dir);
                if dg.is_zero() {
                    continue;
                }
                let mut prefix: Vec<(Generator, u32)> = m.0[..idx].to_vec();
                if *mult > 1 {
                    prefix.push((g.clone(), mult - 1));
                }
                let left = ScalarExpr::from_monomial(Monomial(prefix), *c * Coeff::int(*mult as i128));
                let right = ScalarExpr::from_monomial(Monomial(m.0[idx + 1..].to_vec()), Coeff::one());
                out += &(&(&left * &dg) * &right);
            }
        }
        out
    }

    pub fn derive_n(&self, dir: Dir, n: usize) -> Self {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.derive(dir);
        }
        e
    }

    pub fn dx(&self) -> Self {
        self.derive(Dir::X)
    }

    pub fn dt(&self) -> Self {
        self.derive(Dir::T)
    }

    /// Replaces generators for which `f` returns `Some`, keeping factor order.
    pub fn substitute(&self, f: &dyn Fn(&Generator) -> Option<ScalarExpr>) -> Self {
        let mut out = ScalarExpr::zero();
        for (m, c) in &self.terms {
            let mut changed = false;
            let mut factors = Vec::with_capacity(m.0.len());
            for (g, mult) in &m.0 {
                match f(g) {
                    Some(e) => {
                        changed = true;
                        factors.push(e.pow(*mult));
                    }
                    None => factors.push(ScalarExpr::from_monomial(
                        Monomial(vec![(g.clone(), *mult)]),
                        Coeff::one(),
                    )),
                }
            }
            if !changed {
                out.add_term(m.clone(), *c);
                continue;
            }
            let mut prod = ScalarExpr::constant(*c);
            for e in &factors {
                prod = &prod * e;
                if prod.is_zero() {
                    break;
                }
            }
            out += &prod;
        }
        out
    }

    /// Replaces every jet `d+^a d-^b f` by the same derivative of `value`.
    /// Transcendental generators of `f` are left untouched.
    pub fn substitute_field(&self, f: Field, value: &ScalarExpr) -> Self {
        self.substitute(&|g| match g {
            Generator::Jet { field, dx, dt } if *field == f => Some(
                value
                    .derive_n(Dir::Plus, *dx as usize)
                    .derive_n(Dir::Minus, *dt as usize),
            ),
            _ => None,
        })
    }

    /// Sets every listed field to zero: jets vanish, `exp` and `cosh` become 1, `sinh` 0.
    pub fn set_fields_zero(&self, fields: &[Field]) -> Self {
        self.substitute(&|g| match g.field() {
            Some(f) if fields.contains(&f) => Some(match g {
                Generator::Exp { .. } | Generator::Cosh { .. } => ScalarExpr::one(),
                _ => ScalarExpr::zero(),
            }),
            _ => None,
        })
    }

    pub fn generators(&self) -> BTreeSet<Generator> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(g, _)| g.clone()))
            .collect()
    }

    pub fn fields(&self) -> BTreeSet<Field> {
        self.generators().iter().filter_map(Generator::field).collect()
    }

    pub fn contains_field(&self, f: Field) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(g, _)| g.field() == Some(f)))
    }

    pub fn contains_antiderivative(&self) -> bool {
        self.terms
            .keys()
            .any(|m| m.0.iter().any(|(g, _)| matches!(g, Generator::Anti { .. })))
    }

    /// Applies `f` to every coefficient, dropping zeros.
    pub fn map_coeffs(&self, f: impl Fn(Coeff) -> Coeff) -> Self {
        let mut out = ScalarExpr::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(*c));
        }
        out
    }
}

impl From<Coeff> for ScalarExpr {
    fn from(c: Coeff) -> Self {
        ScalarExpr::constant(c)
    }
}

impl From<Field> for ScalarExpr {
    fn from(f: Field) -> Self {
        ScalarExpr::field(f)
    }
}

impl AddAssign<&ScalarExpr> for ScalarExpr {
    fn add_assign(&mut self, rhs: &ScalarExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), *c);
        }
    }
}

impl AddAssign for ScalarExpr {
    fn add_assign(&mut self, rhs: ScalarExpr) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&ScalarExpr> for ScalarExpr {
    fn sub_assign(&mut self, rhs: &ScalarExpr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -*c);
        }
    }
}

impl SubAssign for ScalarExpr {
    fn sub_assign(&mut self, rhs: ScalarExpr) {
        *self -= &rhs;
    }
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(mut self, rhs: ScalarExpr) -> ScalarExpr {
        self += rhs;
        self
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(mut self, rhs: ScalarExpr) -> ScalarExpr {
        self -= &rhs;
        self
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scale(-Coeff::one())
    }
}

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        self.scale(-Coeff::one())
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = *ca * *cb;
                for (s, m) in multiply_monomials(ma, mb) {
                    out.add_term(m, c * s);
                }
            }
        }
        out
    }
}

impl Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        &self * &rhs
    }
}

impl Mul<Coeff> for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: Coeff) -> ScalarExpr {
        self.scale(rhs)
    }
}

impl Mul<Coeff> for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: Coeff) -> ScalarExpr {
        self.scale(rhs)
    }
}

/// `p * q` in canonical form.
pub fn multiply(p: &ScalarExpr, q: &ScalarExpr) -> ScalarExpr {
    p * q
}

/// `d p` along `dir`.
pub fn derive(p: &ScalarExpr, dir: Dir) -> ScalarExpr {
    p.derive(dir)
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (g, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            if *m == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "({g})^{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg_real = c.im.is_zero() && c.re < num_traits::zero();
            let c_abs = if neg_real { -*c } else { *c };
            if i > 0 {
                f.write_str(if neg_real { " - " } else { " + " })?;
            } else if neg_real {
                f.write_str("-")?;
            }
            if m.is_one() {
                write!(f, "{c_abs}")?;
            } else if c_abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c_abs} {m}")?;
            }
        }
        Ok(())
    }
}
