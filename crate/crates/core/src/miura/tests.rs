use proptest::prelude::*;

use super::*;
use crate::lax::grade_decompose;
use crate::ring::Field;

#[test]
fn miura_examples() {
    assert_eq!(miura_apply(&f(BIG_U00)), -fx(U00, 1) + f(U00).pow(2) + f(U11).pow(2));
    assert_eq!(miura_apply(&f(BIG_U11)), -fx(U11, 1) + (&f(U00) * &f(U11)).scale(Coeff::int(2)));
    let classical = miura_apply(&f(BIG_U00)).set_fields_zero(&[U11]);
    assert_eq!(classical, -fx(U00, 1) + f(U00).pow(2));
}

#[test]
fn factorization_identities_hold_off_shell() {
    let r = miura_factorization_check().unwrap();
    for (n, e) in &r.identities {
        assert!(e.is_zero(), "{n}: {e}");
    }
    for (n, e) in &r.on_shell {
        assert!(e.is_zero(), "{n}: {e}");
    }
    for (n, e) in &r.sigma_unchanged {
        assert!(e.is_zero(), "{n}: {e}");
    }
}

#[test]
fn classical_factorization_oracle() {
    assert!(classical_factorization_residual().is_zero());
}

#[test]
fn riccati_entries_vanish() {
    for row in riccati_form_check() {
        for e in row {
            assert!(e.is_zero());
        }
    }
}

#[test]
fn gauge_maps_mkdv_pair_to_kdv_pair() {
    let r = gauge_check().unwrap();
    assert!(r.lx_difference.is_zero(), "{}", r.lx_difference);
    assert!(r.lt_difference.is_zero(), "{}", r.lt_difference);
    let lowest = grade_decompose(&r.lt).keys().next().unwrap().twice();
    assert_eq!(lowest, -2);
}

#[test]
fn gauge_with_zero_parameter_is_identity() {
    let (mx, _) = crate::lax::mkdv_lax_pair(&crate::lax::printed_mkdv_coefficients());
    let id = gauge_transform_by(&mx, &AlgebraElement::zero(), Dir::X).unwrap();
    assert_eq!(id, mx);
    let g = gauge_transform(&mx, Dir::X).unwrap();
    let flat = g.map(|c| c.set_fields_zero(&[U00, U11]));
    assert_eq!(flat, mx.map(|c| c.set_fields_zero(&[U00, U11])));
}

#[test]
fn gauge_preserves_flatness() {
    let r = gauge_check().unwrap();
    let fc = crate::lax::zero_curvature(&r.lx, &r.lt, (Dir::X, Dir::T));
    assert!(fc.normalize(&crate::lax::mkdv_eom()).unwrap().is_zero());
}

#[test]
fn kdv_is_flat() {
    let r = verify_kdv().unwrap();
    assert!(r.passed(), "{}", r.residual);
}

#[test]
fn mutated_kdv_breaks_flatness() {
    let (lx, lt) = kdv_lax_pair();
    for (g, coeff) in lt.terms() {
        let mut bad = lt.clone();
        bad.add_term(crate::lax::mutate(coeff, 0) - coeff.clone(), g);
        let r = verify_kdv_with(&(lx.clone(), bad), &kdv_eom()).unwrap();
        assert!(!r.passed(), "{g}");
    }
    let eom = kdv_eom();
    for rule in eom.rules() {
        let mut bad = EomSystem::new();
        for r in eom.rules() {
            let rhs = if r.field == rule.field { crate::lax::mutate(&r.rhs, 0) } else { r.rhs.clone() };
            bad.add_rule(r.field, r.min_dx, r.min_dt, rhs).unwrap();
        }
        assert!(!verify_kdv_with(&(lx.clone(), lt.clone()), &bad).unwrap().passed());
    }
}

#[test]
fn kdv_reductions() {
    let (ut, _) = kdv_rhs();
    let u = f(BIG_U00);
    let classical = ut.set_fields_zero(&[BIG_U11, SIGMA10, SIGMA01]);
    assert_eq!(classical, fx(BIG_U00, 3) - (&u * &fx(BIG_U00, 1)).scale(Coeff::int(6)));

    let drop = [BIG_U11, SIGMA01];
    let s = f(SIGMA10);
    let ss = &fx(SIGMA10, 1) * &s;
    let want = fx(BIG_U00, 3) - (&u * &fx(BIG_U00, 1)).scale(Coeff::int(6))
        + (&fx(BIG_U00, 1) * &ss).scale(Coeff::int(6))
        + (&u * &ss.dx()).scale(Coeff::int(12))
        - ss.derive_n(Dir::X, 3).scale(Coeff::int(3));
    assert_eq!(ut.set_fields_zero(&drop), want);
    let (st, _) = kdv_sigma_rhs();
    let want = fx(SIGMA10, 3).scale(Coeff::int(4))
        - (&u * &fx(SIGMA10, 1)).scale(Coeff::int(6))
        - (&fx(BIG_U00, 1) * &s).scale(Coeff::int(3));
    assert_eq!(st.set_fields_zero(&drop), want);
}

#[test]
fn d00_f11_agree_across_variables() {
    let (d, f11) = kdv_d00_f11();
    let coeffs = crate::lax::printed_mkdv_coefficients();
    let get = |n: &str| coeffs.iter().find(|(k, _)| k == n).unwrap().1.clone();
    assert_eq!(miura_apply(&d), get("d00"));
    assert_eq!(miura_apply(&f11), get("f11"));
}

fn arb_u_poly() -> impl Strategy<Value = ScalarExpr> {
    let atoms = || {
        vec![
            f(BIG_U00),
            fx(BIG_U00, 1),
            f(BIG_U11),
            fx(BIG_U11, 2),
            f(SIGMA10),
            fx(SIGMA01, 1),
            ScalarExpr::int(1),
        ]
    };
    prop::collection::vec((0usize..7, 0usize..7, -3i128..=3), 1..4).prop_map(move |v| {
        let a = atoms();
        let mut out = ScalarExpr::zero();
        for (i, j, k) in v {
            out += &(&a[i] * &a[j]).scale(Coeff::int(k));
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn miura_commutes_with_dx(p in arb_u_poly()) {
        prop_assert_eq!(miura_apply(&p.dx()), miura_apply(&p).dx());
    }
}

#[test]
fn miura_is_grade_preserving() {
    assert_eq!(miura_apply(&f(BIG_U00)).homogeneous_grade(), Some(BIG_U00.grade()));
    assert_eq!(miura_apply(&f(BIG_U11)).homogeneous_grade(), Some(BIG_U11.grade()));
    let _ = Field::new("U00", BIG_U00.grade());
}
