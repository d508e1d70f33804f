//! The negative hierarchy: graded Liouville, sinh-Gordon and cosh-Gordon.

use num_traits::Zero;

use super::{zero_curvature, AlgebraElement, FlatnessReport};
use crate::coeff::Coeff;
use crate::fields::*;
use crate::loop_algebra::{Family::*, LoopGenerator};
use crate::ring::{Dir, EomSystem, Freq, RingError, ScalarExpr};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord)]
pub enum NegativeCase {
    Liouville,
    Sinh,
    Cosh,
}

impl NegativeCase {
    pub const ALL: [NegativeCase; 3] = [NegativeCase::Liouville, NegativeCase::Sinh, NegativeCase::Cosh];

    /// The chiral functions `(k, l)` fixed to constants.
    pub fn constants(self) -> (Coeff, Coeff) {
        match self {
            NegativeCase::Liouville => (Coeff::zero(), Coeff::int(-1)),
            NegativeCase::Sinh => (Coeff::frac(1, 2), Coeff::frac(1, 2)),
            NegativeCase::Cosh => (Coeff::frac(1, 2), Coeff::frac(-1, 2)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NegativeCase::Liouville => "liouville",
            NegativeCase::Sinh => "sinh",
            NegativeCase::Cosh => "cosh",
        }
    }
}

fn e2(sign: i32) -> ScalarExpr {
    ScalarExpr::exp(PHI00, Freq::from(2 * sign))
}

fn ch2() -> ScalarExpr {
    ScalarExpr::cosh(PHI11, Freq::from(2))
}

fn sh2() -> ScalarExpr {
    ScalarExpr::sinh(PHI11, Freq::from(2))
}

fn g(family: crate::loop_algebra::Family, mode: i64) -> LoopGenerator {
    LoopGenerator::new(family, mode)
}

/// `(a00, b00, c11, d11)` from the integrated grade -1 equation.
fn integrated_coefficients(k: &ScalarExpr, l: &ScalarExpr) -> [ScalarExpr; 4] {
    let a = k * &(&e2(1) * &ch2());
    let b = l * &(&e2(-1) * &ch2());
    let c = k * &(&e2(1) * &sh2());
    let d = -(l * &(&e2(-1) * &sh2()));
    [a, b, c, d]
}

fn pair_from(k: &ScalarExpr, l: &ScalarExpr) -> (AlgebraElement, AlgebraElement) {
    let mut lp = AlgebraElement::zero();
    lp.add_term(ScalarExpr::jet(PHI00, 1, 0), g(K0, 0));
    lp.add_term(ScalarExpr::jet(PHI11, 1, 0), g(L0, 0));
    lp.add_term(f(SIGMA10), g(Pp, 0));
    lp.add_term(f(SIGMA01), g(Qp, 0));
    lp.add_term(ScalarExpr::one(), g(Kp, 0));
    lp.add_term(ScalarExpr::one(), g(Km, 1));

    let [a, b, c, d] = integrated_coefficients(k, l);
    let mut lm = AlgebraElement::zero();
    lm.add_term(f(RHO10), g(Pm, 0));
    lm.add_term(f(RHO01), g(Qm, 0));
    lm.add_term(a, g(Kp, -1));
    lm.add_term(b, g(Km, 0));
    lm.add_term(c, g(Lp, -1));
    lm.add_term(d, g(Lm, 0));
    (lp, lm)
}

/// `(L+, L-)` with constant `k`, `l`.
pub fn build_negative_pair(k: Coeff, l: Coeff) -> (AlgebraElement, AlgebraElement) {
    pair_from(&ScalarExpr::constant(k), &ScalarExpr::constant(l))
}

/// `(L+, L-)` with `k(x-)`, `l(x-)` kept as chiral symbols.
pub fn build_negative_pair_chiral() -> (AlgebraElement, AlgebraElement) {
    pair_from(&ScalarExpr::chiral(K_CHIRAL), &ScalarExpr::chiral(L_CHIRAL))
}

/// The six-equation system for general `k`, `l` (chiral symbols or constants).
pub fn negative_eom(k: &ScalarExpr, l: &ScalarExpr) -> EomSystem {
    let [a, b, c, d] = integrated_coefficients(k, l);
    let i = Coeff::i();
    let (p00, p11) = (ScalarExpr::jet(PHI00, 1, 0), ScalarExpr::jet(PHI11, 1, 0));
    let (r10, r01, s10, s01) = (f(RHO10), f(RHO01), f(SIGMA10), f(SIGMA01));

    let rho10 = -(&p00 * &r10) - (&p11 * &r01).scale(i) + &s10 * &b - (&s01 * &d).scale(i);
    let rho01 = -(&p00 * &r01) + (&p11 * &r10).scale(i) + &s01 * &b + (&s10 * &d).scale(i);
    let phi00 = &a - &b - &r10 * &s10 - &r01 * &s01;
    let phi11 = &c - &d + (&r10 * &s01 - &r01 * &s10).scale(i);

    EomSystem::new()
        .with_rule(PHI00, 1, 1, phi00)
        .with_rule(PHI11, 1, 1, phi11)
        .with_rule(RHO10, 1, 0, rho10)
        .with_rule(RHO01, 1, 0, rho01)
        .with_rule(SIGMA10, 0, 1, r10)
        .with_rule(SIGMA01, 0, 1, r01)
}

/// The case-specific displays transcribed term by term.
pub fn printed_negative_eom(case: NegativeCase) -> EomSystem {
    let i = Coeff::i();
    let (p00, p11) = (ScalarExpr::jet(PHI00, 1, 0), ScalarExpr::jet(PHI11, 1, 0));
    let (r10, r01, s10, s01) = (f(RHO10), f(RHO01), f(SIGMA10), f(SIGMA01));
    let fermi00 = -(&r10 * &s10) - &r01 * &s01;
    let fermi11 = (&r10 * &s01 - &r01 * &s10).scale(i);
    let kin10 = -(&p00 * &r10) - (&p11 * &r01).scale(i);
    let kin01 = -(&p00 * &r01) + (&p11 * &r10).scale(i);
    // sigma10 cosh 2phi11 + i sigma01 sinh 2phi11, and its [01] partner
    let mix10 = &s10 * &ch2() + (&s01 * &sh2()).scale(i);
    let mix01 = &s01 * &ch2() - (&s10 * &sh2()).scale(i);
    let half = Coeff::frac(1, 2);
    let (sh00, ch00) = (
        ScalarExpr::sinh(PHI00, Freq::from(2)),
        ScalarExpr::cosh(PHI00, Freq::from(2)),
    );

    let (phi00, phi11, rho10, rho01) = match case {
        NegativeCase::Liouville => (
            &e2(-1) * &ch2() + fermi00,
            -(&e2(-1) * &sh2()) + fermi11,
            kin10 - &e2(-1) * &mix10,
            kin01 - &e2(-1) * &mix01,
        ),
        NegativeCase::Sinh => (
            &sh00 * &ch2() + fermi00,
            &ch00 * &sh2() + fermi11,
            kin10 - (&e2(-1) * &mix10).scale(half),
            kin01 - (&e2(-1) * &mix01).scale(half),
        ),
        NegativeCase::Cosh => (
            &ch00 * &ch2() + fermi00,
            &sh00 * &sh2() + fermi11,
            kin10 + (&e2(-1) * &mix10).scale(half),
            kin01 + (&e2(-1) * &mix01).scale(half),
        ),
    };
    EomSystem::new()
        .with_rule(PHI00, 1, 1, phi00)
        .with_rule(PHI11, 1, 1, phi11)
        .with_rule(RHO10, 1, 0, rho10)
        .with_rule(RHO01, 1, 0, rho01)
        .with_rule(SIGMA10, 0, 1, r10)
        .with_rule(SIGMA01, 0, 1, r01)
}

pub fn verify_negative_with(
    name: &str,
    lp: &AlgebraElement,
    lm: &AlgebraElement,
    eom: &EomSystem,
) -> Result<FlatnessReport, RingError> {
    let f = zero_curvature(lp, lm, (Dir::Plus, Dir::Minus));
    Ok(FlatnessReport {
        name: name.to_string(),
        residual: f.normalize(eom)?,
    })
}

/// Flatness of the case's Lax pair under the case's equations of motion.
pub fn verify_negative_hierarchy(case: NegativeCase) -> Result<FlatnessReport, RingError> {
    let (k, l) = case.constants();
    let (lp, lm) = build_negative_pair(k, l);
    let eom = negative_eom(&ScalarExpr::constant(k), &ScalarExpr::constant(l));
    verify_negative_with(case.name(), &lp, &lm, &eom)
}

#[derive(Clone, Debug)]
pub struct ChangeVariablesReport {
    /// `(equation, lhs - rhs after normalization)`.
    pub residuals: Vec<(String, ScalarExpr)>,
}

impl ChangeVariablesReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(|(_, r)| r.is_zero())
    }
}

/// Checks the sinh-Gordon system in the psi variables against the printed sigma/rho form.
pub fn change_variables_check() -> Result<ChangeVariablesReport, RingError> {
    change_variables_check_with(&printed_negative_eom(NegativeCase::Sinh))
}

/// The psi-variable sinh-Gordon equations, normalized under `eom`.
///
/// With `psihat = sqrt2 psi` every coefficient is rational: `psihat10 = sigma10`,
/// `psihat01 = -i sigma01`, and the psibar are taken as defined.
pub fn change_variables_check_with(eom: &EomSystem) -> Result<ChangeVariablesReport, RingError> {
    let i = Coeff::i();
    let one = Freq::from(1);
    let (c1, s1) = (ScalarExpr::cosh(PHI11, one), ScalarExpr::sinh(PHI11, one));
    let (ep, em) = (ScalarExpr::exp(PHI00, one), ScalarExpr::exp(PHI00, -one));
    let (r10, r01) = (f(RHO10), f(RHO01));

    let ps10 = f(SIGMA10);
    let ps01 = f(SIGMA01).scale(-i);
    let pb10 = &ep * &(&r10 * &c1 - (&r01 * &s1).scale(i));
    let pb01 = &ep * &(&r10 * &s1 - (&r01 * &c1).scale(i));

    let bil_a = &ps10 * &pb10 - &ps01 * &pb01;
    let bil_b = &ps01 * &pb10 - &ps10 * &pb01;
    let (sh00, ch00) = (
        ScalarExpr::sinh(PHI00, Freq::from(2)),
        ScalarExpr::cosh(PHI00, Freq::from(2)),
    );
    let half = Coeff::frac(1, 2);

    let eqs: Vec<(&str, ScalarExpr, ScalarExpr)> = vec![
        (
            "phi00",
            ScalarExpr::jet(PHI00, 1, 1),
            &sh00 * &ch2() + &em * &(&bil_a * &c1 + &bil_b * &s1),
        ),
        (
            "phi11",
            ScalarExpr::jet(PHI11, 1, 1),
            &ch00 * &sh2() - &em * &(&s1 * &bil_a + &c1 * &bil_b),
        ),
        (
            "psi10",
            ps10.derive(Dir::Minus),
            &em * &(&pb10 * &c1 - &pb01 * &s1),
        ),
        (
            "psibar10",
            pb10.derive(Dir::Plus),
            -(&em * &(&ps10 * &c1 - &ps01 * &s1)).scale(half),
        ),
        (
            "psi01",
            ps01.derive(Dir::Minus),
            &em * &(&pb01 * &c1 - &pb10 * &s1),
        ),
        (
            "psibar01",
            pb01.derive(Dir::Plus),
            -(&em * &(&ps01 * &c1 - &ps10 * &s1)).scale(half),
        ),
    ];
    let mut residuals = Vec::new();
    for (name, lhs, rhs) in eqs {
        residuals.push((name.to_string(), eom.normalize(&(lhs - rhs))?));
    }
    Ok(ChangeVariablesReport { residuals })
}
