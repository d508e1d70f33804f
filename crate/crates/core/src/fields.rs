//! Named fields and composite expressions shared by the hierarchies.

use crate::grading::Grade;
use crate::ring::{Field, ScalarExpr};

pub const PHI00: Field = Field::fixed("phi00", Grade::G00);
pub const PHI11: Field = Field::fixed("phi11", Grade::G11);
pub const SIGMA10: Field = Field::fixed("sigma10", Grade::G10);
pub const SIGMA01: Field = Field::fixed("sigma01", Grade::G01);
pub const RHO10: Field = Field::fixed("rho10", Grade::G10);
pub const RHO01: Field = Field::fixed("rho01", Grade::G01);
pub const U00: Field = Field::fixed("u00", Grade::G00);
pub const U11: Field = Field::fixed("u11", Grade::G11);
pub const BIG_U00: Field = Field::fixed("U00", Grade::G00);
pub const BIG_U11: Field = Field::fixed("U11", Grade::G11);
pub const PSI10: Field = Field::fixed("psi10", Grade::G10);
pub const PSI01: Field = Field::fixed("psi01", Grade::G01);
pub const PSIBAR10: Field = Field::fixed("psibar10", Grade::G10);
pub const PSIBAR01: Field = Field::fixed("psibar01", Grade::G01);
/// Chiral integration functions `k(x-)` and `l(x-)`.
pub const K_CHIRAL: Field = Field::fixed("k", Grade::G00);
pub const L_CHIRAL: Field = Field::fixed("l", Grade::G00);

pub fn f(field: Field) -> ScalarExpr {
    ScalarExpr::field(field)
}

/// `d/dx^n field`.
pub fn fx(field: Field, n: u16) -> ScalarExpr {
    ScalarExpr::jet(field, n, 0)
}

/// `Sigma00 = sigma10' sigma10 + sigma01' sigma01`.
pub fn sigma00() -> ScalarExpr {
    &fx(SIGMA10, 1) * &f(SIGMA10) + &fx(SIGMA01, 1) * &f(SIGMA01)
}

/// `Sigma11 = sigma01' sigma10 - sigma10' sigma01`.
pub fn sigma11() -> ScalarExpr {
    &fx(SIGMA01, 1) * &f(SIGMA10) - &fx(SIGMA10, 1) * &f(SIGMA01)
}

/// LaTeX symbol for a field name: `sigma10` becomes `\sigma_{10}`, `psibar01` becomes `\bar\psi_{01}`.
pub fn latex_symbol(name: &str) -> String {
    let split = name
        .char_indices()
        .find(|(_, c)| c.is_ascii_digit())
        .map(|(i, _)| i)
        .unwrap_or(name.len());
    let (stem, index) = name.split_at(split);
    let (bar, stem) = match stem.strip_suffix("bar") {
        Some(s) if !s.is_empty() => (true, s),
        _ => (false, stem),
    };
    let greek = [
        "alpha", "beta", "gamma", "delta", "epsilon", "eta", "xi", "rho", "sigma", "phi", "psi",
        "Gamma", "Sigma",
    ];
    let mut out = match stem {
        "l" => "\\ell".to_string(),
        s if greek.contains(&s) => format!("\\{s}"),
        s => s.to_string(),
    };
    if bar {
        out = format!("\\bar{out}");
    }
    if !index.is_empty() {
        out = format!("{out}_{{{index}}}");
    }
    out
}
