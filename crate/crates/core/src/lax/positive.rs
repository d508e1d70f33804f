//! The positive hierarchy: derivation and verification of the graded mKdV system.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{grade_decompose, zero_curvature, AlgebraElement, FlatnessReport, LaxError};
use crate::coeff::Coeff;
use crate::fields::*;
use crate::grading::Grade;
use crate::miura::{miura_u00, miura_u11};
use crate::loop_algebra::{principal_grade, Family, Family::*, LoopGenerator};
use crate::ring::{integrate_x, Dir, EomSystem, Field, Generator, Monomial, RingError, ScalarExpr};

/// The coefficient functions of `L_t`, in the order they are introduced.
pub const UNKNOWNS: [(&str, Grade, Family, i64); 18] = [
    ("a00", Grade::G00, K0, 0),
    ("b11", Grade::G11, L0, 0),
    ("rho10", Grade::G10, Pp, 0),
    ("rho01", Grade::G01, Qp, 0),
    ("c00", Grade::G00, Kp, 0),
    ("d00", Grade::G00, Km, 1),
    ("e11", Grade::G11, Lp, 0),
    ("f11", Grade::G11, Lm, 1),
    ("xi10", Grade::G10, Pm, 1),
    ("xi01", Grade::G01, Qm, 1),
    ("h00", Grade::G00, K0, 1),
    ("k11", Grade::G11, L0, 1),
    ("eta10", Grade::G10, Pp, 1),
    ("eta01", Grade::G01, Qp, 1),
    ("l00", Grade::G00, Kp, 1),
    ("p00", Grade::G00, Km, 2),
    ("r11", Grade::G11, Lp, 1),
    ("s11", Grade::G11, Lm, 2),
];

/// Integration constants: only the top `[00]` pair is switched on.
fn integration_constant(name: &str) -> Coeff {
    match name {
        "l00" | "p00" => Coeff::int(4),
        _ => Coeff::zero(),
    }
}

fn unknown_generator(name: &str) -> LoopGenerator {
    let (_, _, fam, mode) = UNKNOWNS
        .iter()
        .find(|u| u.0 == name)
        .expect("unknown coefficient name");
    LoopGenerator::new(*fam, *mode)
}

fn gen(family: Family, mode: i64) -> LoopGenerator {
    LoopGenerator::new(family, mode)
}

/// `L_x = u00 K0_0 + u11 L0_0 + sigma10 P+_0 + sigma01 Q+_0 + K+_0 + K-_1`.
pub fn mkdv_lax_x() -> AlgebraElement {
    let mut lx = AlgebraElement::zero();
    lx.add_term(f(U00), gen(K0, 0));
    lx.add_term(f(U11), gen(L0, 0));
    lx.add_term(f(SIGMA10), gen(Pp, 0));
    lx.add_term(f(SIGMA01), gen(Qp, 0));
    lx.add_term(ScalarExpr::one(), gen(Kp, 0));
    lx.add_term(ScalarExpr::one(), gen(Km, 1));
    lx
}

/// `(L_x, L_t)` with `L_t` assembled from named coefficients; missing names count as zero.
pub fn mkdv_lax_pair(coefficients: &[(String, ScalarExpr)]) -> (AlgebraElement, AlgebraElement) {
    let mut lt = AlgebraElement::zero();
    for (name, c) in coefficients {
        lt.add_term(c.clone(), unknown_generator(name));
    }
    (mkdv_lax_x(), lt)
}

#[derive(Clone, Debug)]
pub struct HierarchySolution {
    /// Named coefficients of `L_t` in introduction order.
    pub coefficients: Vec<(String, ScalarExpr)>,
    pub eom: EomSystem,
}

impl HierarchySolution {
    pub fn get(&self, name: &str) -> Option<&ScalarExpr> {
        self.coefficients
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }

    pub fn lax_pair(&self) -> (AlgebraElement, AlgebraElement) {
        mkdv_lax_pair(&self.coefficients)
    }
}

/// The coefficient table as printed, in `u00, u11, sigma` jets.
pub fn printed_mkdv_coefficients() -> Vec<(String, ScalarExpr)> {
    let i = Coeff::i();
    let c = Coeff::int;
    let (u, v) = (f(U00), f(U11));
    let (s00, s11) = (sigma00(), sigma11());
    let a00 = fx(U00, 2) - u.pow(3).scale(c(2)) - (&u * &v.pow(2)).scale(c(6))
        + s00.dx().scale(c(3))
        + (&u * &s00).scale(c(6))
        + (&v * &s11).scale(c(6) * i);
    let b11 = fx(U11, 2) - v.pow(3).scale(c(2)) - (&u.pow(2) * &v).scale(c(6))
        + s11.dx().scale(c(3) * i)
        + (&u * &s11).scale(c(6) * i)
        + (&v * &s00).scale(c(6));
    let c00 = (fx(U00, 1) + u.pow(2) + v.pow(2) - s00.clone()).scale(c(-2));
    let d00 = fx(U00, 1).scale(c(2)) - (u.pow(2) + v.pow(2)).scale(c(2)) + s00.scale(c(6));
    let e11 = fx(U11, 1).scale(c(-2)) - (&u * &v).scale(c(4)) + s11.scale(c(2) * i);
    let f11 = fx(U11, 1).scale(c(2)) - (&u * &v).scale(c(4)) + s11.scale(c(6) * i);
    let rho10 = (fx(SIGMA10, 2) + &u * &fx(SIGMA10, 1) + (&v * &fx(SIGMA01, 1)).scale(i)).scale(c(4))
        + &d00 * &f(SIGMA10)
        + (&f11 * &f(SIGMA01)).scale(i);
    let rho01 = (fx(SIGMA01, 2) + &u * &fx(SIGMA01, 1) - (&v * &fx(SIGMA10, 1)).scale(i)).scale(c(4))
        + &d00 * &f(SIGMA01)
        - (&f11 * &f(SIGMA10)).scale(i);
    let table: Vec<(&str, ScalarExpr)> = vec![
        ("a00", a00),
        ("b11", b11),
        ("rho10", rho10),
        ("rho01", rho01),
        ("c00", c00),
        ("d00", d00),
        ("e11", e11),
        ("f11", f11),
        ("xi10", fx(SIGMA10, 1).scale(c(-4))),
        ("xi01", fx(SIGMA01, 1).scale(c(-4))),
        ("h00", u.scale(c(4))),
        ("k11", v.scale(c(4))),
        ("eta10", f(SIGMA10).scale(c(4))),
        ("eta01", f(SIGMA01).scale(c(4))),
        ("l00", ScalarExpr::int(4)),
        ("p00", ScalarExpr::int(4)),
        ("r11", ScalarExpr::zero()),
        ("s11", ScalarExpr::zero()),
    ];
    table.into_iter().map(|(n, e)| (n.to_string(), e)).collect()
}

/// The graded mKdV equations as printed, with `U00`, `U11` spelled out through the Miura map.
pub fn mkdv_eom() -> EomSystem {
    let i = Coeff::i();
    let c = Coeff::int;
    let coeffs = printed_mkdv_coefficients();
    let get = |n: &str| coeffs.iter().find(|(k, _)| k == n).unwrap().1.clone();
    let (bu, bv) = (miura_u00(), miura_u11());
    let (s10, s01) = (f(SIGMA10), f(SIGMA01));
    let sig10 = fx(SIGMA10, 3).scale(c(4))
        - (&bu * &fx(SIGMA10, 1)).scale(c(6))
        - (&bv * &fx(SIGMA01, 1)).scale(c(6) * i)
        - (&bu.dx() * &s10).scale(c(3))
        - (&bv.dx() * &s01).scale(c(3) * i);
    let sig01 = fx(SIGMA01, 3).scale(c(4))
        - (&bu * &fx(SIGMA01, 1)).scale(c(6))
        + (&bv * &fx(SIGMA10, 1)).scale(c(6) * i)
        - (&bu.dx() * &s01).scale(c(3))
        + (&bv.dx() * &s10).scale(c(3) * i);
    EomSystem::new()
        .with_rule(U00, 0, 1, get("a00").dx())
        .with_rule(U11, 0, 1, get("b11").dx())
        .with_rule(SIGMA10, 0, 1, sig10)
        .with_rule(SIGMA01, 0, 1, sig01)
}

pub fn verify_mkdv_with(
    coefficients: &[(String, ScalarExpr)],
    eom: &EomSystem,
) -> Result<FlatnessReport, RingError> {
    let (lx, lt) = mkdv_lax_pair(coefficients);
    let fc = zero_curvature(&lx, &lt, (Dir::X, Dir::T));
    Ok(FlatnessReport {
        name: "mkdv".into(),
        residual: fc.normalize(eom)?,
    })
}

/// Flatness of the printed Lax pair under the printed equations.
pub fn verify_mkdv() -> Result<FlatnessReport, RingError> {
    verify_mkdv_with(&printed_mkdv_coefficients(), &mkdv_eom())
}

struct Unknown {
    name: &'static str,
    field: Field,
    rank: (i64, Family),
}

/// Solves the zero-curvature equation for the 18 coefficients of `L_t`,
/// grade by grade from the top, then reads off the evolution equations.
pub fn solve_positive_hierarchy() -> Result<HierarchySolution, LaxError> {
    let unknowns: Vec<Unknown> = UNKNOWNS
        .iter()
        .map(|(n, gr, fam, mode)| Unknown {
            name: n,
            field: Field::new(n, *gr),
            rank: (-principal_grade(gen(*fam, *mode)).twice(), *fam),
        })
        .collect();
    let mut by_priority: Vec<usize> = (0..unknowns.len()).collect();
    by_priority.sort_by_key(|&k| unknowns[k].rank);

    let mut lt = AlgebraElement::zero();
    for (u, (_, _, fam, mode)) in unknowns.iter().zip(UNKNOWNS.iter()) {
        lt.add_term(f(u.field), gen(*fam, *mode));
    }
    let curvature = zero_curvature(&mkdv_lax_x(), &lt, (Dir::X, Dir::T));

    // Components of grade >= 1 constrain L_t; grades 0 and 1/2 are the equations of motion.
    let mut constraints: Vec<(LoopGenerator, ScalarExpr)> = Vec::new();
    let mut dynamics: Vec<(LoopGenerator, ScalarExpr)> = Vec::new();
    for (pg, part) in grade_decompose(&curvature).into_iter().rev() {
        for (g, c) in part.terms() {
            if pg.twice() >= 2 {
                constraints.push((g, c.clone()));
            } else {
                dynamics.push((g, c.clone()));
            }
        }
    }

    let mut solved: BTreeMap<usize, ScalarExpr> = BTreeMap::new();
    loop {
        let step = algebraic_step(&constraints, &unknowns, &by_priority)
            .map(Ok)
            .or_else(|| differential_step(&constraints, &unknowns).transpose())
            .transpose()?;
        let Some((k, value)) = step else { break };
        let fld = unknowns[k].field;
        for (_, c) in constraints.iter_mut() {
            *c = c.substitute_field(fld, &value);
        }
        for v in solved.values_mut() {
            *v = v.substitute_field(fld, &value);
        }
        solved.insert(k, value);
    }

    if let Some((g, c)) = constraints.iter().find(|(_, c)| !c.is_zero()) {
        return Err(LaxError::Inconsistent(format!("{g}: {c} = 0")));
    }
    let missing: Vec<&str> = (0..unknowns.len())
        .filter(|k| !solved.contains_key(k))
        .map(|k| unknowns[k].name)
        .collect();
    if !missing.is_empty() {
        return Err(LaxError::UnderDetermined(missing.join(", ")));
    }

    let coefficients: Vec<(String, ScalarExpr)> = (0..unknowns.len())
        .map(|k| (unknowns[k].name.to_string(), solved[&k].clone()))
        .collect();

    let mut eom = EomSystem::new();
    for (g, c) in dynamics {
        let mut c = c;
        for (k, u) in unknowns.iter().enumerate() {
            c = c.substitute_field(u.field, &solved[&k]);
        }
        let target = match g.family {
            K0 => U00,
            L0 => U11,
            Pp => SIGMA10,
            Qp => SIGMA01,
            _ => return Err(LaxError::Inconsistent(format!("unexpected component {g}"))),
        };
        let jet = Monomial(vec![(Generator::jet(target, 0, 1), 1)]);
        let lead = c.coeff_of(&jet);
        let inv = lead
            .inv()
            .ok_or_else(|| LaxError::Inconsistent(format!("no time derivative in {g}")))?;
        let rest = &c - &ScalarExpr::from_monomial(jet, lead);
        eom.add_rule(target, 0, 1, rest.scale(-inv))?;
    }
    Ok(HierarchySolution { coefficients, eom })
}

/// The jets of unknown fields occurring in `e`, as `(unknown index, dx)`.
fn unknown_jets(e: &ScalarExpr, unknowns: &[Unknown]) -> Vec<(usize, u16)> {
    let mut out = Vec::new();
    for g in e.generators() {
        if let Generator::Jet { field, dx, .. } = g {
            if let Some(k) = unknowns.iter().position(|u| u.field == field) {
                out.push((k, dx));
            }
        }
    }
    out
}

/// If every occurrence of `fld` in `e` is `c * d_x^n fld` for one `n` and constant `c`,
/// returns `(c, n)`.
pub(crate) fn linear_occurrence(e: &ScalarExpr, fld: Field) -> Option<(Coeff, u16)> {
    let mut found: Option<(Coeff, u16)> = None;
    for (m, c) in e.terms() {
        if !m.factors().iter().any(|(g, _)| g.field() == Some(fld)) {
            continue;
        }
        match m.factors() {
            [(Generator::Jet { field, dx, dt: 0 }, 1)] if *field == fld => match found {
                None => found = Some((*c, *dx)),
                Some(_) => return None,
            },
            _ => return None,
        }
    }
    found
}

fn algebraic_step(
    constraints: &[(LoopGenerator, ScalarExpr)],
    unknowns: &[Unknown],
    by_priority: &[usize],
) -> Option<(usize, ScalarExpr)> {
    for (_, e) in constraints {
        if e.is_zero() {
            continue;
        }
        let present = unknown_jets(e, unknowns);
        for &k in by_priority {
            if !present.iter().any(|(j, _)| *j == k) {
                continue;
            }
            if let Some((c, 0)) = linear_occurrence(e, unknowns[k].field) {
                let inv = c.inv()?;
                let rest = e - &ScalarExpr::jet(unknowns[k].field, 0, 0).scale(c);
                return Some((k, rest.scale(-inv)));
            }
        }
    }
    None
}

/// `c d_x U + R = 0` with `R` free of unknowns: `U = -(1/c) int R + const`.
fn differential_step(
    constraints: &[(LoopGenerator, ScalarExpr)],
    unknowns: &[Unknown],
) -> Result<Option<(usize, ScalarExpr)>, LaxError> {
    for (_, e) in constraints {
        let present = unknown_jets(e, unknowns);
        let Some(&(k, _)) = present.first() else { continue };
        if present.iter().any(|(j, _)| *j != k) {
            continue;
        }
        let fld = unknowns[k].field;
        if let Some((c, 1)) = linear_occurrence(e, fld) {
            let inv = c.inv().expect("nonzero coefficient");
            let rest = e - &ScalarExpr::jet(fld, 1, 0).scale(c);
            let mut value = integrate_x(&rest)?.scale(-inv);
            value += &ScalarExpr::constant(integration_constant(unknowns[k].name));
            debug_assert!(!value.contains_field(fld));
            return Ok(Some((k, value)));
        }
    }
    Ok(None)
}
