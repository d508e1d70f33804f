//! JSON and LaTeX renderings of expressions, matrices, solutions and densities.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::charges::ConservedDensity;
use crate::coeff::{Coeff, Rational};
use crate::fields::latex_symbol;
use crate::grading::Grade;
use crate::lax::{AlgebraElement, HierarchySolution};
use crate::rep6::LaurentMatrix;
use crate::ring::{AntiderivativeRegistry, Field, Freq, Generator, ScalarExpr};

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad generator descriptor: {0}")]
    Descriptor(String),
}

/// Serialized generator: kind, field, multi-index, parameter and grade.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub kind: String,
    pub field: String,
    pub grade: Grade,
    #[serde(default, skip_serializing_if = "is_zero_u16")]
    pub dx: u16,
    #[serde(default, skip_serializing_if = "is_zero_u16")]
    pub dt: u16,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<String>,
    /// `dW/dx` for an antiderivative `W`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defining: Option<Box<ExprJson>>,
}

fn is_zero_u16(n: &u16) -> bool {
    *n == 0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: Coeff,
    pub monomial: Vec<(GeneratorJson, u32)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExprJson {
    pub terms: Vec<TermJson>,
}

fn freq_string(k: Freq) -> String {
    format!("{}/{}", k.numer(), k.denom())
}

fn parse_freq(s: &str) -> Result<Freq, EmitError> {
    let bad = || EmitError::Descriptor(format!("frequency {s:?}"));
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    let n: i32 = n.trim().parse().map_err(|_| bad())?;
    let d: i32 = d.trim().parse().map_err(|_| bad())?;
    if d == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(n, d))
}

fn generator_json(g: &Generator) -> GeneratorJson {
    let (kind, dx, dt, param, defining) = match g {
        Generator::Jet { dx, dt, .. } => ("jet", *dx, *dt, None, None),
        Generator::Chiral { dt, .. } => ("chiral", 0, *dt, None, None),
        Generator::Exp { k, .. } => ("exp", 0, 0, Some(freq_string(*k)), None),
        Generator::Cosh { k, .. } => ("cosh", 0, 0, Some(freq_string(*k)), None),
        Generator::Sinh { k, .. } => ("sinh", 0, 0, Some(freq_string(*k)), None),
        Generator::Anti { def, dt } => ("anti", 0, *dt, None, Some(Box::new(to_json(&def.defining)))),
    };
    let grade = match g {
        Generator::Jet { field, .. }
        | Generator::Chiral { field, .. }
        | Generator::Exp { field, .. }
        | Generator::Cosh { field, .. }
        | Generator::Sinh { field, .. } => field.grade(),
        Generator::Anti { def, .. } => def.grade,
    };
    GeneratorJson {
        kind: kind.to_string(),
        field: g.field_name().to_string(),
        grade,
        dx,
        dt,
        param,
        defining,
    }
}

pub fn to_json(e: &ScalarExpr) -> ExprJson {
    ExprJson {
        terms: e
            .terms()
            .map(|(m, c)| TermJson {
                coeff: *c,
                monomial: m.factors().iter().map(|(g, k)| (generator_json(g), *k)).collect(),
            })
            .collect(),
    }
}

fn generator_from_json(g: &GeneratorJson, registry: &AntiderivativeRegistry) -> Result<Generator, EmitError> {
    let field = Field::new(&g.field, g.grade);
    let k = || {
        g.param
            .as_deref()
            .ok_or_else(|| EmitError::Descriptor(format!("{} needs a parameter", g.kind)))
            .and_then(parse_freq)
    };
    Ok(match g.kind.as_str() {
        "jet" => Generator::Jet {
            field,
            dx: g.dx,
            dt: g.dt,
        },
        "chiral" => Generator::Chiral { field, dt: g.dt },
        "exp" => Generator::Exp { field, k: k()? },
        "cosh" => Generator::Cosh { field, k: k()? },
        "sinh" => Generator::Sinh { field, k: k()? },
        "anti" => {
            let def = match registry.get(&g.field) {
                Some(def) => def,
                None => {
                    let defining = g
                        .defining
                        .as_deref()
                        .ok_or_else(|| EmitError::Descriptor(format!("antiderivative {} without definition", g.field)))?;
                    let e = from_json_with(defining, registry)?;
                    registry
                        .new_antiderivative(&g.field, g.grade, e)
                        .map_err(|e| EmitError::Descriptor(e.to_string()))?;
                    registry.get(&g.field).expect("just registered")
                }
            };
            Generator::Anti { def, dt: g.dt }
        }
        other => return Err(EmitError::Descriptor(format!("unknown kind {other:?}"))),
    })
}

/// Rebuilds an expression, registering antiderivatives in `registry` by name.
pub fn from_json_with(j: &ExprJson, registry: &AntiderivativeRegistry) -> Result<ScalarExpr, EmitError> {
    let mut out = ScalarExpr::zero();
    for t in &j.terms {
        let mut prod = ScalarExpr::constant(t.coeff);
        for (g, k) in &t.monomial {
            prod = &prod * &ScalarExpr::from_generator(generator_from_json(g, registry)?).pow(*k);
        }
        out += prod;
    }
    Ok(out)
}

pub fn from_json(j: &ExprJson) -> Result<ScalarExpr, EmitError> {
    from_json_with(j, &AntiderivativeRegistry::new())
}

pub fn expr_to_json_string(e: &ScalarExpr) -> String {
    serde_json::to_string(&to_json(e)).expect("serializable")
}

pub fn expr_from_json_str(s: &str) -> Result<ScalarExpr, EmitError> {
    from_json(&serde_json::from_str(s)?)
}

fn latex_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// Coefficient text with the sign pulled out; `None` for a unit coefficient.
fn latex_coeff(c: &Coeff) -> (bool, Option<String>) {
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        (neg, (!a.is_one()).then(|| latex_rational(&a)))
    } else if c.re.is_zero() {
        let neg = c.im.is_negative();
        let a = c.im.abs();
        let body = if a.is_one() {
            "i".to_string()
        } else {
            format!("{}i", latex_rational(&a))
        };
        (neg, Some(body))
    } else {
        let sep = if c.im.is_negative() { "-" } else { "+" };
        let im = c.im.abs();
        let im = if im.is_one() {
            "i".to_string()
        } else {
            format!("{}i", latex_rational(&im))
        };
        (false, Some(format!("({}{sep}{im})", latex_rational(&c.re))))
    }
}

fn latex_freq(k: Freq, sym: &str) -> String {
    if k.is_one() {
        sym.to_string()
    } else if (-k).is_one() {
        format!("-{sym}")
    } else if k.is_integer() {
        format!("{}{sym}", k.numer())
    } else {
        format!("\\tfrac{{{}}}{{{}}}{sym}", k.numer(), k.denom())
    }
}

fn latex_jet(base: &str, dx: u16, dt: u16) -> String {
    let mut s = base.to_string();
    match dx {
        0 => {}
        1..=3 => s.push_str(&"'".repeat(dx as usize)),
        n => s.push_str(&format!("^{{({n})}}")),
    }
    match dt {
        0 => s,
        1 => format!("\\partial_t {s}"),
        n => format!("\\partial_t^{{{n}}} {s}"),
    }
}

/// LaTeX for a generator; the flag says whether a power needs parentheses.
fn latex_generator(g: &Generator) -> (String, bool) {
    match g {
        Generator::Jet { field, dx, dt } => {
            (latex_jet(&latex_symbol(field.name()), *dx, *dt), *dx > 0 || *dt > 0)
        }
        Generator::Chiral { field, dt } => (latex_jet(&format!("{}(x^-)", latex_symbol(field.name())), 0, *dt), true),
        Generator::Exp { field, k } => (format!("e^{{{}}}", latex_freq(*k, &latex_symbol(field.name()))), true),
        Generator::Cosh { field, k } => (format!("\\cosh {}", latex_freq(*k, &latex_symbol(field.name()))), true),
        Generator::Sinh { field, k } => (format!("\\sinh {}", latex_freq(*k, &latex_symbol(field.name()))), true),
        Generator::Anti { def, dt } => (latex_jet(&latex_symbol(&def.name), 0, *dt), *dt > 0),
    }
}

pub fn latex_expr(e: &ScalarExpr) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, c)) in e.terms().enumerate() {
        let (neg, coeff) = latex_coeff(c);
        if idx == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let factors: Vec<String> = m
            .factors()
            .iter()
            .map(|(g, k)| {
                let (s, wrap) = latex_generator(g);
                match (*k, wrap) {
                    (1, _) => s,
                    (k, true) => format!("({s})^{{{k}}}"),
                    (k, false) => format!("{s}^{{{k}}}"),
                }
            })
            .collect();
        match (coeff, factors.is_empty()) {
            (Some(c), true) => out.push_str(&c),
            (None, true) => out.push('1'),
            (Some(c), false) => {
                out.push_str(&c);
                out.push(' ');
                out.push_str(&factors.join(" "));
            }
            (None, false) => out.push_str(&factors.join(" ")),
        }
    }
    out
}

fn latex_laurent(l: &BTreeMap<i64, ScalarExpr>) -> String {
    if l.is_empty() {
        return "0".to_string();
    }
    let parts: Vec<String> = l
        .iter()
        .rev()
        .map(|(p, e)| {
            let lam = match p {
                0 => String::new(),
                1 => "\\lambda".to_string(),
                p => format!("\\lambda^{{{p}}}"),
            };
            match (lam.is_empty(), e.as_constant()) {
                (true, _) => latex_expr(e),
                (false, Some(c)) if c.is_one() => lam,
                (false, Some(c)) if (-c).is_one() => format!("-{lam}"),
                (false, _) if e.len() == 1 => format!("{} {lam}", latex_expr(e)),
                (false, _) => format!("{lam} ({})", latex_expr(e)),
            }
        })
        .collect();
    parts.join(" + ").replace("+ -", "- ")
}

pub fn latex_matrix(m: &LaurentMatrix) -> String {
    let mut s = String::from("\\begin{pmatrix}\n");
    for row in m.entries() {
        let cells: Vec<String> = row.iter().map(latex_laurent).collect();
        let _ = writeln!(s, "  {} \\\\", cells.join(" & "));
    }
    s.push_str("\\end{pmatrix}");
    s
}

/// Nested rows of `{power: expression}`.
pub fn matrix_json(m: &LaurentMatrix) -> serde_json::Value {
    let rows: Vec<serde_json::Value> = m
        .entries()
        .iter()
        .map(|row| {
            serde_json::Value::Array(
                row.iter()
                    .map(|l| {
                        let obj: serde_json::Map<String, serde_json::Value> = l
                            .iter()
                            .map(|(p, e)| (p.to_string(), serde_json::to_value(to_json(e)).expect("serializable")))
                            .collect();
                        serde_json::Value::Object(obj)
                    })
                    .collect(),
            )
        })
        .collect();
    serde_json::Value::Array(rows)
}

pub fn latex_algebra_element(a: &AlgebraElement) -> String {
    if a.is_zero() {
        return "0".to_string();
    }
    let parts: Vec<String> = a
        .terms()
        .map(|(g, c)| {
            let (stem, sup) = g.family.latex_parts();
            let gen = format!("{stem}^{{{sup}}}_{{{}}}", g.mode);
            match c.as_constant() {
                Some(k) if k.is_one() => gen,
                _ if c.len() == 1 => format!("{} {gen}", latex_expr(c)),
                _ => format!("({}) {gen}", latex_expr(c)),
            }
        })
        .collect();
    parts.join(" + ")
}

/// Coefficients keyed by name.
pub fn solution_json(sol: &HierarchySolution) -> serde_json::Value {
    let obj: serde_json::Map<String, serde_json::Value> = sol
        .coefficients
        .iter()
        .map(|(n, e)| (n.clone(), serde_json::to_value(to_json(e)).expect("serializable")))
        .collect();
    serde_json::Value::Object(obj)
}

fn latex_name(n: &str) -> String {
    let split = n.find(|c: char| c.is_ascii_digit()).unwrap_or(n.len());
    let (stem, idx) = n.split_at(split);
    let stem = match stem {
        "xi" | "eta" | "rho" => format!("\\{stem}"),
        s => s.to_string(),
    };
    if idx.is_empty() {
        stem
    } else {
        format!("{stem}_{{{idx}}}")
    }
}

/// Two-column table of coefficient name and value.
pub fn solution_latex(sol: &HierarchySolution) -> String {
    let mut s = String::from("\\begin{align*}\n");
    let n = sol.coefficients.len();
    for (i, (name, e)) in sol.coefficients.iter().enumerate() {
        let end = if i + 1 < n { " \\\\" } else { "" };
        let _ = writeln!(s, "  {} &= {}{end}", latex_name(name), latex_expr(e));
    }
    s.push_str("\\end{align*}");
    s
}

#[derive(Serialize)]
struct DensityJson<'a> {
    order: usize,
    grade: Grade,
    density: ExprJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
}

pub fn densities_json(ds: &[ConservedDensity]) -> serde_json::Value {
    let v: Vec<DensityJson> = ds
        .iter()
        .map(|d| DensityJson {
            order: d.order,
            grade: d.grade,
            density: to_json(&d.density),
            label: None,
        })
        .collect();
    serde_json::to_value(v).expect("serializable")
}

pub fn densities_latex(ds: &[ConservedDensity]) -> String {
    let mut s = String::from("\\begin{align*}\n");
    let n = ds.len();
    for (i, d) in ds.iter().enumerate() {
        let end = if i + 1 < n { " \\\\" } else { "" };
        let _ = writeln!(s, "  Q^{{({})}} &= \\int dx\\, \\big({}\\big){end}", d.order, latex_expr(&d.density));
    }
    s.push_str("\\end{align*}");
    s
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::fields::*;

    #[test]
    fn latex_uses_primes() {
        let e = fx(U00, 1).pow(2) - (&f(U00) * &fx(SIGMA10, 2)).scale(Coeff::frac(3, 2));
        let s = latex_expr(&e);
        assert!(s.contains("(u_{00}')^{2}"), "{s}");
        assert!(s.starts_with("-\\frac{3}{2} \\sigma_{10}'' u_{00}"), "{s}");
        assert_eq!(latex_expr(&fx(U11, 5)), "u_{11}^{(5)}");
        assert_eq!(latex_expr(&ScalarExpr::zero()), "0");
        assert_eq!(latex_expr(&ScalarExpr::constant(Coeff::imag(-1))), "-i");
    }

    #[test]
    fn latex_transcendentals() {
        let e = ScalarExpr::exp(PHI00, Freq::from(-2));
        assert_eq!(latex_expr(&e), "e^{-2\\phi_{00}}");
    }

    #[test]
    fn json_schema_shape() {
        let e = fx(SIGMA10, 1).scale(Coeff::frac(-1, 2));
        let v: serde_json::Value = serde_json::from_str(&expr_to_json_string(&e)).unwrap();
        let t = &v["terms"][0];
        assert_eq!(t["coeff"]["re"], "-1/2");
        assert_eq!(t["coeff"]["im"], "0/1");
        assert_eq!(t["monomial"][0][0]["kind"], "jet");
        assert_eq!(t["monomial"][0][0]["field"], "sigma10");
        assert_eq!(t["monomial"][0][0]["grade"], "[10]");
        assert_eq!(t["monomial"][0][0]["dx"], 1);
        assert_eq!(t["monomial"][0][1], 1);
    }

    #[test]
    fn antiderivatives_round_trip() {
        let reg = AntiderivativeRegistry::new();
        let w = reg.new_antiderivative("W", Grade::G11, f(BIG_U11)).unwrap();
        let e = &ScalarExpr::from_generator(w) * &fx(SIGMA01, 1);
        let back = expr_from_json_str(&expr_to_json_string(&e)).unwrap();
        assert_eq!(back, e);
        assert_eq!(back.dx(), e.dx());
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let s = r#"{"terms":[{"coeff":{"re":"1/1","im":"0/1"},"monomial":[[{"kind":"bogus","field":"u","grade":"[00]"},1]]}]}"#;
        assert!(matches!(expr_from_json_str(s), Err(EmitError::Descriptor(_))));
    }

    #[test]
    fn solution_emitters() {
        let sol = crate::lax::solve_positive_hierarchy().unwrap();
        let j = solution_json(&sol);
        assert_eq!(j.as_object().unwrap().len(), 18);
        let back = from_json(&serde_json::from_value(j["b11"].clone()).unwrap()).unwrap();
        assert_eq!(&back, sol.get("b11").unwrap());
        let tex = solution_latex(&sol);
        assert!(tex.contains("\\rho_{10} &="), "{tex}");
        assert_eq!(tex, solution_latex(&sol));
    }

    #[test]
    fn matrix_emitters() {
        let m = crate::rep6::lax_matrix_kdv();
        let tex = latex_matrix(&m);
        assert!(tex.contains("\\lambda^{2} + U_{00} \\lambda^{-2}"), "{tex}");
        assert!(tex.contains("-i \\sigma_{10} \\lambda"), "{tex}");
        let j = matrix_json(&m);
        assert_eq!(j.as_array().unwrap().len(), 6);
        assert_eq!(j[0][0].as_object().unwrap().len(), 0);
    }

    fn arb_expr() -> impl Strategy<Value = ScalarExpr> {
        let atoms = || {
            vec![
                f(U00),
                fx(U11, 2),
                ScalarExpr::jet(SIGMA10, 1, 1),
                f(SIGMA01),
                ScalarExpr::exp(PHI00, Freq::new(-3, 2)),
                ScalarExpr::sinh(PHI11, Freq::from(2)),
                ScalarExpr::chiral(K_CHIRAL),
            ]
        };
        prop::collection::vec((0usize..7, 0usize..7, -5i128..=5, -2i128..=2, 1i128..4), 1..5).prop_map(
            move |v| {
                let a = atoms();
                let mut out = ScalarExpr::zero();
                for (i, j, re, im, d) in v {
                    let c = Coeff::from_parts(Rational::new(re, d), Rational::new(im, d));
                    out += &(&a[i] * &a[j]).scale(c);
                }
                out
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn json_round_trips(e in arb_expr()) {
            let s = expr_to_json_string(&e);
            let back = expr_from_json_str(&s).unwrap();
            prop_assert_eq!(&back, &e);
            prop_assert_eq!(expr_to_json_string(&back), s);
        }

        #[test]
        fn latex_is_deterministic(e in arb_expr()) {
            prop_assert_eq!(latex_expr(&e), latex_expr(&e.clone()));
        }
    }
}
