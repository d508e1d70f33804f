//! Miura map, the graded KdV system and the gauge equivalence with mKdV.

use crate::coeff::Coeff;
use crate::fields::*;
use crate::lax::{
    algebra_bracket, mkdv_eom, mkdv_lax_pair, printed_mkdv_coefficients, zero_curvature,
    AlgebraElement, FlatnessReport, LaxError,
};
use crate::loop_algebra::{principal_grade, Family::*, LoopGenerator, PrincipalGrade};
use crate::ring::{Dir, EomSystem, RingError, ScalarExpr};

/// Lowest principal grade (twice) the adjoint series may reach.
const GRADE_FLOOR: i64 = -8;
const MAX_ORDER: i64 = 16;

fn c(n: i128) -> Coeff {
    Coeff::int(n)
}

/// `-u00' + u00^2 + u11^2`.
pub fn miura_u00() -> ScalarExpr {
    -fx(U00, 1) + f(U00).pow(2) + f(U11).pow(2)
}

/// `-u11' + 2 u00 u11`.
pub fn miura_u11() -> ScalarExpr {
    -fx(U11, 1) + (&f(U00) * &f(U11)).scale(c(2))
}

/// Rewrites `U00`, `U11` jets (including time derivatives) in terms of `u00`, `u11`.
pub fn miura_apply(p: &ScalarExpr) -> ScalarExpr {
    p.substitute_field(BIG_U00, &miura_u00())
        .substitute_field(BIG_U11, &miura_u11())
}

/// `A00 = U00'' - 3(U00^2 + U11^2 + Sigma00'') + 6(U00 Sigma00 + i U11 Sigma11)`.
pub fn kdv_a00() -> ScalarExpr {
    let (u, v) = (f(BIG_U00), f(BIG_U11));
    let (s00, s11) = (sigma00(), sigma11());
    fx(BIG_U00, 2) - (u.pow(2) + v.pow(2) + s00.dx().dx()).scale(c(3))
        + (&u * &s00 + (&v * &s11).scale(Coeff::i())).scale(c(6))
}

/// `B11 = U11'' - 3(2 U00 U11 + i Sigma11'') + 6(U11 Sigma00 + i U00 Sigma11)`.
pub fn kdv_b11() -> ScalarExpr {
    let (u, v) = (f(BIG_U00), f(BIG_U11));
    let (s00, s11) = (sigma00(), sigma11());
    fx(BIG_U11, 2) - ((&u * &v).scale(c(2)) + s11.dx().dx().scale(Coeff::i())).scale(c(3))
        + (&v * &s00 + (&u * &s11).scale(Coeff::i())).scale(c(6))
}

/// Right-hand sides of the graded KdV equations for `U00`, `U11`.
pub fn kdv_rhs() -> (ScalarExpr, ScalarExpr) {
    let (u, v) = (f(BIG_U00), f(BIG_U11));
    let (s00, s11) = (sigma00(), sigma11());
    let i = Coeff::i();
    let ut = kdv_a00().dx() + (&u * &s00.dx() + (&v * &s11.dx()).scale(i)).scale(c(6));
    let vt = kdv_b11().dx() + (&v * &s00.dx() + (&u * &s11.dx()).scale(i)).scale(c(6));
    (ut, vt)
}

/// The sigma equations with `U00`, `U11` as primitive fields.
pub fn kdv_sigma_rhs() -> (ScalarExpr, ScalarExpr) {
    let i = Coeff::i();
    let (u, v) = (f(BIG_U00), f(BIG_U11));
    let (s10, s01) = (f(SIGMA10), f(SIGMA01));
    let a = fx(SIGMA10, 3).scale(c(4))
        - (&u * &fx(SIGMA10, 1)).scale(c(6))
        - (&v * &fx(SIGMA01, 1)).scale(c(6) * i)
        - (&u.dx() * &s10).scale(c(3))
        - (&v.dx() * &s01).scale(c(3) * i);
    let b = fx(SIGMA01, 3).scale(c(4))
        - (&u * &fx(SIGMA01, 1)).scale(c(6))
        + (&v * &fx(SIGMA10, 1)).scale(c(6) * i)
        - (&u.dx() * &s01).scale(c(3))
        + (&v.dx() * &s10).scale(c(3) * i);
    (a, b)
}

pub fn kdv_eom() -> EomSystem {
    let (ut, vt) = kdv_rhs();
    let (s10, s01) = kdv_sigma_rhs();
    EomSystem::new()
        .with_rule(BIG_U00, 0, 1, ut)
        .with_rule(BIG_U11, 0, 1, vt)
        .with_rule(SIGMA10, 0, 1, s10)
        .with_rule(SIGMA01, 0, 1, s01)
}

/// `d00 = 2(-U00 + 3 Sigma00)`, `f11 = 2(-U11 + 3i Sigma11)`.
pub fn kdv_d00_f11() -> (ScalarExpr, ScalarExpr) {
    let d = (-f(BIG_U00) + sigma00().scale(c(3))).scale(c(2));
    let f11 = (-f(BIG_U11) + sigma11().scale(c(3) * Coeff::i())).scale(c(2));
    (d, f11)
}

fn gen(family: crate::loop_algebra::Family, mode: i64) -> LoopGenerator {
    LoopGenerator::new(family, mode)
}

/// The KdV Lax pair as printed, in `U` jets.
pub fn kdv_lax_pair() -> (AlgebraElement, AlgebraElement) {
    let i = Coeff::i();
    let (u, v) = (f(BIG_U00), f(BIG_U11));
    let (s10, s01) = (f(SIGMA10), f(SIGMA01));
    let (s00, s11) = (sigma00(), sigma11());
    let (d00, f11) = kdv_d00_f11();

    let mut lx = AlgebraElement::zero();
    lx.add_term(u.clone(), gen(Kp, -1));
    lx.add_term(v.clone(), gen(Lp, -1));
    lx.add_term(s10.clone(), gen(Pp, 0));
    lx.add_term(s01.clone(), gen(Qp, 0));
    lx.add_term(ScalarExpr::one(), gen(Kp, 0));
    lx.add_term(ScalarExpr::one(), gen(Km, 1));

    let half = Coeff::frac(1, 2);
    let mut lt = AlgebraElement::zero();
    lt.add_term(kdv_a00() + u.pow(2) + v.pow(2), gen(Kp, -1));
    lt.add_term(kdv_b11() + (&u * &v).scale(c(2)), gen(Lp, -1));
    lt.add_term(d00.dx().scale(half), gen(K0, 0));
    lt.add_term(f11.dx().scale(half), gen(L0, 0));
    lt.add_term(
        fx(SIGMA10, 2).scale(c(4)) + &d00 * &s10 + (&f11 * &s01).scale(i),
        gen(Pp, 0),
    );
    lt.add_term(
        fx(SIGMA01, 2).scale(c(4)) + &d00 * &s01 - (&f11 * &s10).scale(i),
        gen(Qp, 0),
    );
    lt.add_term((&u + &s00).scale(c(2)), gen(Kp, 0));
    lt.add_term((&v + &s11.scale(i)).scale(c(2)), gen(Lp, 0));
    lt.add_term(d00, gen(Km, 1));
    lt.add_term(f11, gen(Lm, 1));
    lt.add_term(fx(SIGMA10, 1).scale(c(-4)), gen(Pm, 1));
    lt.add_term(fx(SIGMA01, 1).scale(c(-4)), gen(Qm, 1));
    lt.add_term(s10.scale(c(4)), gen(Pp, 1));
    lt.add_term(s01.scale(c(4)), gen(Qp, 1));
    lt.add_term(ScalarExpr::int(4), gen(Kp, 1));
    lt.add_term(ScalarExpr::int(4), gen(Km, 2));
    (lx, lt)
}

pub fn verify_kdv() -> Result<FlatnessReport, RingError> {
    verify_kdv_with(&kdv_lax_pair(), &kdv_eom())
}

pub fn verify_kdv_with(
    pair: &(AlgebraElement, AlgebraElement),
    eom: &EomSystem,
) -> Result<FlatnessReport, RingError> {
    let fc = zero_curvature(&pair.0, &pair.1, (Dir::X, Dir::T));
    Ok(FlatnessReport {
        name: "kdv".into(),
        residual: fc.normalize(eom)?,
    })
}

/// The gauge parameter `N = u00 K+_{-1} + u11 L+_{-1}`.
pub fn gauge_parameter() -> AlgebraElement {
    let mut n = AlgebraElement::zero();
    n.add_term(f(U00), gen(Kp, -1));
    n.add_term(f(U11), gen(Lp, -1));
    n
}

/// `g^{-1} L g - g^{-1} d g` for `g = exp(N)`: the adjoint series `exp(-ad_N) L`, minus `dN`
/// (the two generators of `N` commute, so `g^{-1} dg = dN`).
pub fn gauge_transform(l: &AlgebraElement, dir: Dir) -> Result<AlgebraElement, LaxError> {
    gauge_transform_by(l, &gauge_parameter(), dir)
}

pub fn gauge_transform_by(
    l: &AlgebraElement,
    n: &AlgebraElement,
    dir: Dir,
) -> Result<AlgebraElement, LaxError> {
    let mut out = l.clone();
    let mut term = l.clone();
    let mut k = 1;
    while !term.is_zero() {
        if k > MAX_ORDER {
            return Err(LaxError::Inconsistent("adjoint series did not terminate".into()));
        }
        term = algebra_bracket(n, &term).scale(Coeff::frac(-1, k as i128));
        if let Some((g, _)) = term
            .terms()
            .find(|(g, _)| principal_grade(*g) < PrincipalGrade(GRADE_FLOOR))
        {
            return Err(LaxError::Inconsistent(format!("adjoint series passed the grade floor at {g}")));
        }
        out = &out + &term;
        k += 1;
    }
    Ok(&out - &n.derive(dir))
}

/// Both off-shell identities relating the mKdV and KdV equations.
#[derive(Clone, Debug)]
pub struct FactorizationReport {
    /// `lhs - rhs` for each identity, expanded in `u` jets.
    pub identities: Vec<(String, ScalarExpr)>,
    /// The KdV combinations normalized with the mKdV equations.
    pub on_shell: Vec<(String, ScalarExpr)>,
    /// The KdV sigma equations pulled back by the Miura map minus the mKdV ones.
    pub sigma_unchanged: Vec<(String, ScalarExpr)>,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.identities
            .iter()
            .chain(&self.on_shell)
            .chain(&self.sigma_unchanged)
            .all(|(_, e)| e.is_zero())
    }
}

pub fn miura_factorization_check() -> Result<FactorizationReport, RingError> {
    let coeffs = printed_mkdv_coefficients();
    let get = |n: &str| coeffs.iter().find(|(k, _)| k == n).unwrap().1.clone();
    let ev00 = -ScalarExpr::jet(U00, 0, 1) + get("a00").dx();
    let ev11 = -ScalarExpr::jet(U11, 0, 1) + get("b11").dx();
    let op = |e: &ScalarExpr| -e.dx() + (&f(U00) * e).scale(c(2));
    let two_v = f(U11).scale(c(2));
    let lhs0 = op(&ev00) + &two_v * &ev11;
    let lhs1 = op(&ev11) + &two_v * &ev00;

    let (ut, vt) = kdv_rhs();
    let kdv0 = -ScalarExpr::jet(BIG_U00, 0, 1) + ut;
    let kdv1 = -ScalarExpr::jet(BIG_U11, 0, 1) + vt;
    let (rhs0, rhs1) = (miura_apply(&kdv0), miura_apply(&kdv1));

    let eom = mkdv_eom();
    let (ks10, ks01) = kdv_sigma_rhs();
    Ok(FactorizationReport {
        identities: vec![
            ("U00".into(), lhs0 - rhs0.clone()),
            ("U11".into(), lhs1 - rhs1.clone()),
        ],
        on_shell: vec![
            ("U00".into(), eom.normalize(&rhs0)?),
            ("U11".into(), eom.normalize(&rhs1)?),
        ],
        sigma_unchanged: vec![
            ("sigma10".into(), miura_apply(&ks10) - eom.rule(SIGMA10).unwrap().rhs.clone()),
            ("sigma01".into(), miura_apply(&ks01) - eom.rule(SIGMA01).unwrap().rhs.clone()),
        ],
    })
}

/// The one-field identity `(-d + 2u)(-u_t + (u'' - 2u^3)') = -(U_t - (U'' - 3U^2)')`,
/// `U = -u' + u^2`, expanded directly.
pub fn classical_factorization_residual() -> ScalarExpr {
    let u = f(U00);
    let mkdv = -ScalarExpr::jet(U00, 0, 1) + (fx(U00, 2) - u.pow(3).scale(c(2))).dx();
    let lhs = -mkdv.dx() + (&u * &mkdv).scale(c(2));
    let big = -fx(U00, 1) + u.pow(2);
    let big_t = big.dt();
    let rhs = -(big_t - (big.dx().dx() - big.pow(2).scale(c(3))).dx());
    lhs - rhs
}

/// `U = Y' + Y^2` entrywise, with `U = [[U00, U11], [U11, U00]]`, `Y = -[[u00, u11], [u11, u00]]`.
pub fn riccati_form_check() -> [[ScalarExpr; 2]; 2] {
    let y = [[-f(U00), -f(U11)], [-f(U11), -f(U00)]];
    let u = [[miura_u00(), miura_u11()], [miura_u11(), miura_u00()]];
    let mut out: [[ScalarExpr; 2]; 2] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            let mut e = y[i][j].dx();
            for (k, row) in y.iter().enumerate() {
                e += &(&y[i][k] * &row[j]);
            }
            out[i][j] = &u[i][j] - &e;
        }
    }
    out
}

/// Gauge images of the mKdV pair, and their difference from the printed KdV pair
/// (pulled back by the Miura map and normalized with the mKdV equations).
pub struct GaugeReport {
    pub lx: AlgebraElement,
    pub lt: AlgebraElement,
    pub lx_difference: AlgebraElement,
    pub lt_difference: AlgebraElement,
}

impl GaugeReport {
    pub fn passed(&self) -> bool {
        self.lx_difference.is_zero() && self.lt_difference.is_zero()
    }
}

pub fn gauge_check() -> Result<GaugeReport, LaxError> {
    let (mx, mt) = mkdv_lax_pair(&printed_mkdv_coefficients());
    let lx = gauge_transform(&mx, Dir::X)?;
    let lt = gauge_transform(&mt, Dir::T)?;
    let (kx, kt) = kdv_lax_pair();
    let eom = mkdv_eom();
    let pull = |a: &AlgebraElement| a.map(miura_apply);
    let lx_difference = (&lx - &pull(&kx)).normalize(&eom)?;
    let lt_difference = (&lt - &pull(&kt)).normalize(&eom)?;
    Ok(GaugeReport {
        lx,
        lt,
        lx_difference,
        lt_difference,
    })
}

#[cfg(test)]
mod tests;
