//! x-integration, the graded Euler operator and reduction modulo total x-derivatives.

use std::collections::BTreeMap;

use super::generator::freq_coeff;
use super::{Dir, Field, Generator, Monomial, RingError, ScalarExpr};
use crate::coeff::Coeff;

const STEP_LIMIT: usize = 10_000;

/// A (field, t-order) pair: the x-jets `v^(n)` of one variable.
type Var = (Field, u16);

fn jet_var(g: &Generator) -> Option<(Var, u16)> {
    match g {
        Generator::Jet { field, dx, dt } => Some(((*field, *dt), *dx)),
        _ => None,
    }
}

fn jet_of(v: Var, dx: u16) -> Generator {
    Generator::Jet {
        field: v.0,
        dx,
        dt: v.1,
    }
}

/// Splits `m = sign * m[idx] * rest` by moving factor `idx` to the front.
fn pull_out(m: &Monomial, idx: usize) -> (Coeff, Monomial) {
    let g = m.0[idx].0.grade();
    let before = m.0[..idx]
        .iter()
        .fold(crate::grading::Grade::G00, |acc, (h, k)| acc + h.grade().times(*k));
    let sign = Coeff::from_sign(g.sign(before));
    let mut rest = m.0.clone();
    if rest[idx].1 > 1 {
        rest[idx].1 -= 1;
    } else {
        rest.remove(idx);
    }
    (sign, Monomial(rest))
}

/// One integration-by-parts step: a `t` whose x-derivative contains `c * m`
/// as its leading part, or `None` if `m` has no strippable factor.
fn strip_step(m: &Monomial, c: Coeff, canonical: bool) -> Option<ScalarExpr> {
    let jets: Vec<(usize, Var, u16)> = m
        .0
        .iter()
        .enumerate()
        .filter_map(|(i, (g, _))| jet_var(g).map(|(v, n)| (i, v, n)))
        .collect();
    let top = jets.iter().map(|j| j.2).max()?;
    if top == 0 {
        return None;
    }
    let tops: Vec<_> = jets.iter().filter(|j| j.2 == top).collect();
    if tops.len() != 1 {
        return None;
    }
    let (idx, v, n) = *tops[0];
    if m.0[idx].1 != 1 {
        return None;
    }
    if canonical {
        let ok = jets.iter().all(|&(_, w, k)| {
            (w == v && k == n) || k + 2 <= n || (k + 1 == n && w >= v)
        });
        if !ok {
            return None;
        }
    }
    let (sign, rest) = pull_out(m, idx);
    let coeff = c * sign;

    if n == 1 {
        let trans: Vec<usize> = rest
            .0
            .iter()
            .enumerate()
            .filter(|(_, (g, _))| g.is_transcendental() && g.field() == Some(v.0) && v.1 == 0)
            .map(|(i, _)| i)
            .collect();
        if !trans.is_empty() {
            let has_base = rest.0.iter().any(|(g, _)| jet_var(g) == Some((v, 0)));
            if trans.len() != 1 || rest.0[trans[0]].1 != 1 || has_base {
                return None;
            }
            let i = trans[0];
            let (g, k) = match &rest.0[i].0 {
                Generator::Exp { field, k } => (Generator::Exp { field: *field, k: *k }, *k),
                Generator::Cosh { field, k } => (Generator::Sinh { field: *field, k: *k }, *k),
                Generator::Sinh { field, k } => (Generator::Cosh { field: *field, k: *k }, *k),
                _ => unreachable!(),
            };
            let mut others = rest.0.clone();
            others[i].0 = g;
            let inv_k = freq_coeff(k).inv()?;
            return Some(ScalarExpr::from_monomial(Monomial(others), coeff * inv_k));
        }
    }

    let lower = jet_of(v, n - 1);
    let j = rest
        .0
        .iter()
        .find(|(g, _)| *g == lower)
        .map(|(_, k)| *k)
        .unwrap_or(0);
    if j > 0 && v.0.grade().is_odd() {
        return None;
    }
    let factor = coeff * Coeff::frac(1, (j + 1) as i128);
    Some(&ScalarExpr::from_generator(lower) * &ScalarExpr::from_monomial(rest, factor))
}

fn pick_target(p: &ScalarExpr) -> Option<(Monomial, Coeff)> {
    p.terms()
        .filter_map(|(m, c)| {
            let top = m
                .0
                .iter()
                .filter_map(|(g, _)| jet_var(g).map(|(v, n)| (n, v)))
                .max()?;
            Some((top, m, c))
        })
        .max_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)))
        .map(|(_, m, c)| (m.clone(), *c))
}

/// Returns `q` with `dq/dx = p`, found by greedy integration by parts and
/// checked by differentiating back.
pub fn integrate_x(p: &ScalarExpr) -> Result<ScalarExpr, RingError> {
    if p.is_zero() {
        return Ok(ScalarExpr::zero());
    }
    if !p.contains_antiderivative() && !is_total_derivative(p) {
        return Err(RingError::NotExact(p.to_string()));
    }
    let mut rem = p.clone();
    let mut acc = ScalarExpr::zero();
    for _ in 0..STEP_LIMIT {
        if rem.is_zero() {
            break;
        }
        let (m, c) = pick_target(&rem).ok_or_else(|| RingError::NotExact(p.to_string()))?;
        let t = strip_step(&m, c, false).ok_or_else(|| RingError::NotExact(p.to_string()))?;
        rem -= t.dx();
        acc += t;
    }
    if !rem.is_zero() || acc.dx() != *p {
        return Err(RingError::NotExact(p.to_string()));
    }
    Ok(acc)
}

/// Splits `p = normal + d/dx(integrated)` where `normal` contains no
/// monomial that a canonical integration-by-parts step could lower.
pub fn reduce_mod_dx(p: &ScalarExpr) -> Result<(ScalarExpr, ScalarExpr), RingError> {
    let mut rem = p.clone();
    let mut integrated = ScalarExpr::zero();
    for _ in 0..STEP_LIMIT {
        let best = rem
            .terms()
            .filter_map(|(m, c)| strip_step(m, *c, true).map(|t| (m.clone(), t)))
            .max_by(|a, b| rank(&a.0).cmp(&rank(&b.0)).then_with(|| a.0.cmp(&b.0)));
        match best {
            Some((_, t)) => {
                rem -= t.dx();
                integrated += t;
            }
            None => return Ok((rem, integrated)),
        }
    }
    Err(RingError::NonTermination)
}

fn rank(m: &Monomial) -> Option<(u16, Var)> {
    m.0.iter()
        .filter_map(|(g, _)| jet_var(g).map(|(v, n)| (n, v)))
        .max()
}

/// Left partial derivative `d m / d g` for a single generator.
fn partial_monomial(m: &Monomial, target: &Generator) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for (idx, (g, mult)) in m.0.iter().enumerate() {
        if g == target {
            let (sign, rest) = pull_out(m, idx);
            out.add_term(rest, sign * Coeff::int(*mult as i128));
        }
    }
    out
}

/// `d m / d phi^(0)` collecting contributions of transcendental factors of `field`.
fn partial_transcendental(m: &Monomial, field: Field) -> ScalarExpr {
    let mut out = ScalarExpr::zero();
    for (idx, (g, _)) in m.0.iter().enumerate() {
        if g.field() != Some(field) || !g.is_transcendental() {
            continue;
        }
        let (replacement, k) = match g {
            Generator::Exp { k, .. } => (g.clone(), *k),
            Generator::Cosh { field, k } => (Generator::Sinh { field: *field, k: *k }, *k),
            Generator::Sinh { field, k } => (Generator::Cosh { field: *field, k: *k }, *k),
            _ => unreachable!(),
        };
        // Transcendentals of a field never repeat after linearization.
        let (sign, rest) = pull_out(m, idx);
        let e = &ScalarExpr::from_generator(replacement) * &ScalarExpr::from_monomial(rest, sign);
        out += e.scale(freq_coeff(k));
    }
    out
}

/// Graded variational derivative with respect to the variable `v = (field, t-order)`.
pub fn euler_operator(p: &ScalarExpr, field: Field, dt: u16) -> ScalarExpr {
    let v: Var = (field, dt);
    let mut by_order: BTreeMap<u16, ScalarExpr> = BTreeMap::new();
    for (m, c) in p.terms() {
        for (g, _) in &m.0 {
            if let Some((w, n)) = jet_var(g) {
                if w == v {
                    let d = partial_monomial(m, g).scale(*c);
                    *by_order.entry(n).or_default() += d;
                }
            }
        }
        if dt == 0 && m.0.iter().any(|(g, _)| g.is_transcendental() && g.field() == Some(field)) {
            *by_order.entry(0).or_default() += partial_transcendental(m, field).scale(*c);
        }
    }
    let mut out = ScalarExpr::zero();
    for (n, e) in by_order {
        let mut d = e.derive_n(Dir::X, n as usize);
        if n % 2 == 1 {
            d = -d;
        }
        out += d;
    }
    out
}

/// True iff `p` is `d/dx` of an element of the ring.
pub fn is_total_derivative(p: &ScalarExpr) -> bool {
    if p.is_zero() {
        return true;
    }
    if p.contains_antiderivative() {
        return integrate_x(p).is_ok();
    }
    let x_constant = p.terms().any(|(m, _)| {
        m.0.iter()
            .all(|(g, _)| matches!(g, Generator::Chiral { .. }))
    });
    if x_constant {
        return false;
    }
    let mut vars: Vec<Var> = Vec::new();
    for g in p.generators() {
        match g {
            Generator::Jet { field, dt, .. } => vars.push((field, dt)),
            Generator::Exp { field, .. } | Generator::Cosh { field, .. } | Generator::Sinh { field, .. } => {
                vars.push((field, 0))
            }
            _ => {}
        }
    }
    vars.sort();
    vars.dedup();
    vars.iter().all(|&(f, dt)| euler_operator(p, f, dt).is_zero())
}

/// `a - b` is a total x-derivative.
pub fn equal_mod_dx(a: &ScalarExpr, b: &ScalarExpr) -> bool {
    is_total_derivative(&(a - b))
}
