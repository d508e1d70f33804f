use num_traits::Zero;
use proptest::prelude::*;

use super::*;
use crate::fields::*;
use crate::grading::Grade;
use crate::loop_algebra::{Family, Family::*};
use crate::rep6::matrix_graded_bracket;

fn g(f: Family, m: i64) -> LoopGenerator {
    LoopGenerator::new(f, m)
}

#[test]
fn bracket_examples() {
    let a = AlgebraElement::term(f(SIGMA10), g(Pp, 0));
    let b = AlgebraElement::term(f(SIGMA01), g(Qp, 0));
    let want = AlgebraElement::term((&f(SIGMA10) * &f(SIGMA01)).scale(Coeff::imag(2)), g(Lp, 0));
    assert_eq!(algebra_bracket(&a, &b), want);

    let u = AlgebraElement::term(f(U00), g(K0, 0));
    let want = AlgebraElement::term(f(U00).scale(Coeff::int(2)), g(Kp, 0));
    assert_eq!(algebra_bracket(&u, &AlgebraElement::generator(g(Kp, 0))), want);

    assert!(algebra_bracket(&a, &a).is_zero());
}

#[test]
fn curvature_examples() {
    let z = AlgebraElement::zero();
    assert!(zero_curvature(&z, &z, (Dir::Plus, Dir::Minus)).is_zero());
    let f = zero_curvature(
        &AlgebraElement::generator(g(Kp, 0)),
        &AlgebraElement::generator(g(Km, 0)),
        (Dir::Plus, Dir::Minus),
    );
    assert_eq!(f, AlgebraElement::generator(g(K0, 0)));
}

#[test]
fn decompose_by_principal_grade() {
    let e = &AlgebraElement::generator(g(Kp, 0)) + &AlgebraElement::generator(g(Pm, 0));
    let parts = grade_decompose(&e);
    assert_eq!(parts.len(), 2);
    assert_eq!(parts[&PrincipalGrade(2)], AlgebraElement::generator(g(Kp, 0)));
    assert_eq!(parts[&PrincipalGrade(-1)], AlgebraElement::generator(g(Pm, 0)));
    assert!(grade_decompose(&AlgebraElement::zero()).is_empty());
}

#[test]
fn liouville_pair_coefficients() {
    let (_, lm) = build_negative_pair(Coeff::zero(), Coeff::int(-1));
    let e = ScalarExpr::exp(PHI00, (-2).into());
    assert!(lm.coeff(g(Kp, -1)).is_zero());
    assert!(lm.coeff(g(Lp, -1)).is_zero());
    assert_eq!(lm.coeff(g(Km, 0)), -(&e * &ScalarExpr::cosh(PHI11, 2.into())));
    assert_eq!(lm.coeff(g(Lm, 0)), &e * &ScalarExpr::sinh(PHI11, 2.into()));
    assert!(lm.is_total_00());
}

#[test]
fn negative_cases_are_flat() {
    for case in NegativeCase::ALL {
        let r = verify_negative_hierarchy(case).unwrap();
        assert!(r.passed(), "{}: {}", case.name(), r.residual);
    }
}

#[test]
fn chiral_system_is_flat() {
    let (lp, lm) = build_negative_pair_chiral();
    let eom = negative_eom(&ScalarExpr::chiral(K_CHIRAL), &ScalarExpr::chiral(L_CHIRAL));
    let r = verify_negative_with("chiral", &lp, &lm, &eom).unwrap();
    assert!(r.passed(), "{}", r.residual);
}

#[test]
fn printed_liouville_display_agrees() {
    let (k, l) = NegativeCase::Liouville.constants();
    let (lp, lm) = build_negative_pair(k, l);
    let r = verify_negative_with("liouville", &lp, &lm, &printed_negative_eom(NegativeCase::Liouville)).unwrap();
    assert!(r.passed());
}

/// The printed sinh/cosh displays carry the opposite sign on the e^{-2 phi00} term of the
/// rho equations; the residual is exactly twice that term, nothing else.
#[test]
fn printed_sinh_cosh_rho_lines_differ_in_sign() {
    for case in [NegativeCase::Sinh, NegativeCase::Cosh] {
        let (k, l) = case.constants();
        let (lp, lm) = build_negative_pair(k, l);
        let r = verify_negative_with(case.name(), &lp, &lm, &printed_negative_eom(case)).unwrap();
        let parts = grade_decompose(&r.residual);
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![PrincipalGrade(-1)]);
        let gen_eom = negative_eom(&ScalarExpr::constant(k), &ScalarExpr::constant(l));
        let pr = printed_negative_eom(case);
        for fld in [PHI00, PHI11] {
            assert_eq!(gen_eom.rule(fld).unwrap().rhs, pr.rule(fld).unwrap().rhs);
        }
        for fld in [RHO10, RHO01] {
            let gen_rhs = &gen_eom.rule(fld).unwrap().rhs;
            let pr_rhs = &pr.rule(fld).unwrap().rhs;
            let kinetic = gen_rhs.set_fields_zero(&[SIGMA10, SIGMA01]);
            assert_eq!(&(pr_rhs - &kinetic), &-(gen_rhs - &kinetic));
        }
    }
}

#[test]
fn mutated_eom_breaks_flatness() {
    for case in NegativeCase::ALL {
        let (k, l) = case.constants();
        let (lp, lm) = build_negative_pair(k, l);
        let eom = negative_eom(&ScalarExpr::constant(k), &ScalarExpr::constant(l));
        for rule in eom.rules() {
            let mut bad = EomSystem::new();
            for r in eom.rules() {
                let rhs = if r.field == rule.field { mutate(&r.rhs, 0) } else { r.rhs.clone() };
                bad.add_rule(r.field, r.min_dx, r.min_dt, rhs).unwrap();
            }
            let r = verify_negative_with(case.name(), &lp, &lm, &bad).unwrap();
            assert!(!r.passed(), "{} {}", case.name(), rule.field);
        }
    }
}

#[test]
fn psi_form_matches_printed_sinh_gordon() {
    let r = change_variables_check().unwrap();
    assert!(r.passed(), "{:?}", r.residuals);
    let names: Vec<_> = r.residuals.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["phi00", "phi11", "psi10", "psibar10", "psi01", "psibar01"]);
}

#[test]
fn psi_form_inherits_the_sign_conflict() {
    let (k, l) = NegativeCase::Sinh.constants();
    let eom = negative_eom(&ScalarExpr::constant(k), &ScalarExpr::constant(l));
    let r = change_variables_check_with(&eom).unwrap();
    let bad: Vec<_> = r.residuals.iter().filter(|(_, e)| !e.is_zero()).map(|(n, _)| n.as_str()).collect();
    assert_eq!(bad, ["psibar10", "psibar01"]);
}

#[test]
fn sinh_gordon_classical_limit() {
    let eom = printed_negative_eom(NegativeCase::Sinh);
    let rhs = eom.rule(PHI00).unwrap().rhs.set_fields_zero(&[PHI11, SIGMA10, SIGMA01, RHO10, RHO01]);
    assert_eq!(rhs, ScalarExpr::sinh(PHI00, 2.into()));
}

#[test]
fn solver_reproduces_printed_table() {
    let s = solve_positive_hierarchy().unwrap();
    let printed = printed_mkdv_coefficients();
    assert_eq!(s.coefficients.len(), 18);
    for (name, e) in &printed {
        assert_eq!(s.get(name).unwrap(), e, "{name}");
    }
    assert_eq!(s.get("h00").unwrap(), &f(U00).scale(Coeff::int(4)));
    assert_eq!(s.get("xi10").unwrap(), &fx(SIGMA10, 1).scale(Coeff::int(-4)));
    let printed_eom = mkdv_eom();
    for r in s.eom.rules() {
        assert_eq!(r.rhs, printed_eom.rule(r.field).unwrap().rhs, "{}", r.field);
    }
}

#[test]
fn mkdv_is_flat_and_every_component_vanishes() {
    let r = verify_mkdv().unwrap();
    assert!(r.passed(), "{}", r.residual);
    let (lx, lt) = mkdv_lax_pair(&printed_mkdv_coefficients());
    let parts = grade_decompose(&zero_curvature(&lx, &lt, (Dir::X, Dir::T)).normalize(&mkdv_eom()).unwrap());
    assert!(parts.is_empty());
}

#[test]
fn printed_table_leaves_only_the_dynamical_grades() {
    let (lx, lt) = mkdv_lax_pair(&printed_mkdv_coefficients());
    let parts = grade_decompose(&zero_curvature(&lx, &lt, (Dir::X, Dir::T)));
    let grades: Vec<i64> = parts.keys().map(|p| p.twice()).collect();
    assert_eq!(grades, vec![0, 1]);
}

#[test]
fn generic_mkdv_curvature_has_nine_grade_components() {
    let unknown: Vec<(String, ScalarExpr)> = UNKNOWNS
        .iter()
        .map(|(n, gr, _, _)| (n.to_string(), f(crate::ring::Field::new(n, *gr))))
        .collect();
    let (lx, lt) = mkdv_lax_pair(&unknown);
    let parts = grade_decompose(&zero_curvature(&lx, &lt, (Dir::X, Dir::T)));
    let grades: Vec<i64> = parts.keys().map(|p| p.twice()).collect();
    assert_eq!(grades, (0..=8).collect::<Vec<_>>());
}

/// Zero entries are perturbed by the grade-matching field instead of a bare constant.
pub(crate) fn perturb(name: &str, e: &ScalarExpr) -> ScalarExpr {
    if e.is_zero() {
        return match name {
            "r11" | "s11" => f(U11),
            _ => ScalarExpr::one(),
        };
    }
    mutate(e, 0)
}

#[test]
fn mutated_mkdv_coefficient_breaks_flatness() {
    let printed = printed_mkdv_coefficients();
    for k in 0..printed.len() {
        let mut t = printed.clone();
        t[k].1 = perturb(&t[k].0, &t[k].1);
        let r = verify_mkdv_with(&t, &mkdv_eom()).unwrap();
        assert!(!r.passed(), "{}", t[k].0);
    }
}

#[test]
fn classical_and_super_mkdv_reductions() {
    let eom = mkdv_eom();
    let u = f(U00);
    let classical = eom.rule(U00).unwrap().rhs.set_fields_zero(&[U11, SIGMA10, SIGMA01]);
    assert_eq!(classical, fx(U00, 3) - (&fx(U00, 1) * &u.pow(2)).scale(Coeff::int(6)));

    let drop = [U11, SIGMA01];
    let s = f(SIGMA10);
    let u_t = eom.rule(U00).unwrap().rhs.set_fields_zero(&drop);
    let inner = &fx(SIGMA10, 2) * &s + (&(&u * &fx(SIGMA10, 1)) * &s).scale(Coeff::int(2));
    let want = fx(U00, 3) - (&fx(U00, 1) * &u.pow(2)).scale(Coeff::int(6)) + inner.dx().scale(Coeff::int(3));
    assert_eq!(u_t, want);

    let s_t = eom.rule(SIGMA10).unwrap().rhs.set_fields_zero(&drop);
    let want = fx(SIGMA10, 3).scale(Coeff::int(4))
        - (&(-fx(U00, 1) + u.pow(2)) * &fx(SIGMA10, 1)).scale(Coeff::int(6))
        - (&(-fx(U00, 2) + (&fx(U00, 1) * &u).scale(Coeff::int(2))) * &s).scale(Coeff::int(3));
    assert_eq!(s_t, want);
}

#[test]
fn rep_of_lax_pair_is_total_even() {
    let (lx, lt) = mkdv_lax_pair(&printed_mkdv_coefficients());
    assert!(lx.is_total_00() && lt.is_total_00());
}

fn coefficient_pool() -> Vec<ScalarExpr> {
    vec![
        ScalarExpr::int(1),
        ScalarExpr::constant(Coeff::imag(2)),
        f(U00),
        f(U11),
        fx(U11, 1),
        f(SIGMA10),
        f(SIGMA01),
        fx(SIGMA10, 1),
        &f(U11) * &f(SIGMA01),
        &f(SIGMA10) * &f(SIGMA01),
    ]
}

fn arb_term() -> impl Strategy<Value = (ScalarExpr, LoopGenerator)> {
    (0usize..10, 0usize..10, -1i64..=1).prop_map(|(c, fam, m)| {
        (coefficient_pool()[c].clone(), LoopGenerator::new(Family::ALL[fam], m))
    })
}

fn total_grade(t: &(ScalarExpr, LoopGenerator)) -> Grade {
    t.0.homogeneous_grade().unwrap() + t.1.grade()
}

fn elem(t: &(ScalarExpr, LoopGenerator)) -> AlgebraElement {
    AlgebraElement::term(t.0.clone(), t.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_graded_antisymmetry(a in arb_term(), b in arb_term()) {
        let ab = algebra_bracket(&elem(&a), &elem(&b));
        let ba = algebra_bracket(&elem(&b), &elem(&a));
        let s = Coeff::from_sign(-total_grade(&a).sign(total_grade(&b)));
        prop_assert_eq!(ab, ba.scale(s));
    }

    #[test]
    fn bracket_graded_jacobi(a in arb_term(), b in arb_term(), c in arb_term()) {
        let (ga, gb, gc) = (total_grade(&a), total_grade(&b), total_grade(&c));
        let (x, y, z) = (elem(&a), elem(&b), elem(&c));
        let t1 = algebra_bracket(&x, &algebra_bracket(&y, &z)).scale(Coeff::from_sign(ga.sign(gc)));
        let t2 = algebra_bracket(&y, &algebra_bracket(&z, &x)).scale(Coeff::from_sign(gb.sign(ga)));
        let t3 = algebra_bracket(&z, &algebra_bracket(&x, &y)).scale(Coeff::from_sign(gc.sign(gb)));
        prop_assert!((&(&t1 + &t2) + &t3).is_zero());
    }

    #[test]
    fn rep_is_a_homomorphism_on_total_even_elements(a in arb_term(), b in arb_term()) {
        prop_assume!(total_grade(&a) == Grade::G00 && total_grade(&b) == Grade::G00);
        let (x, y) = (elem(&a), elem(&b));
        let lhs = algebra_bracket(&x, &y).to_matrix();
        let rhs = matrix_graded_bracket(&x.to_matrix(), Grade::G00, &y.to_matrix(), Grade::G00);
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn rep_homomorphism_on_the_mkdv_pair() {
    let (lx, lt) = mkdv_lax_pair(&printed_mkdv_coefficients());
    let lhs = algebra_bracket(&lx, &lt).to_matrix();
    let rhs = matrix_graded_bracket(&lx.to_matrix(), Grade::G00, &lt.to_matrix(), Grade::G00);
    assert_eq!(lhs, rhs);
}
