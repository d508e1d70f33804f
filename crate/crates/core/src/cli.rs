//! Command-line driver.
//!
//! Exit status: 0 when every check passes, 1 on a failed check, 2 on an
//! internal error. With `--output`, the emitted artifact goes to the file and
//! the check report stays on the main stream.

use std::fmt::Display;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::charges::{
    extract_densities, gamma_residuals, gamma_solve, graded_charge_checks, map_charges_via_miura,
    printed_kdv_charges, printed_mkdv_charges, proportional_mod_dx, verify_conservation, ChargeError,
    ConservedDensity,
};
use crate::emit;
use crate::lax::{
    build_negative_pair, grade_decompose, printed_mkdv_coefficients, printed_negative_eom,
    solve_positive_hierarchy, verify_mkdv, verify_negative_hierarchy, verify_negative_with, LaxError,
    NegativeCase,
};
use crate::loop_algebra::{antisymmetry_sweep, derivation_sweep, jacobi_sweep, latex_table, structure_constants, Derivation};
use crate::miura::{gauge_check, kdv_eom, miura_factorization_check, riccati_form_check, verify_kdv};
use crate::rep6::{lax_matrix_kdv, verify_rep};
use crate::ring::{EomSystem, RingError};

/// Environment variable holding the worker count.
pub const THREADS_ENV: &str = "Z22OSP_THREADS";

#[derive(Parser, Debug, Clone)]
#[command(name = "z22osp", version, about = "Exact checks for the Z2xZ2-graded osp(1|2) hierarchy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Loop modes -w..=w used by the algebra and representation sweeps.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(i64).range(0..=8))]
    pub mode_window: i64,
    /// Highest order of the charge recursion.
    #[arg(long, global = true, default_value_t = 8)]
    pub order: usize,
    /// Branch of the charge recursion.
    #[arg(long, global = true, default_value = "1", allow_negative_numbers = true, value_parser = parse_epsilon)]
    pub epsilon: i8,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the emitted artifact here instead of the main stream.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// System whose charges are reported.
    #[arg(long, global = true, value_enum, default_value_t = System::Kdv)]
    pub system: System,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Graded Jacobi, antisymmetry and derivation sweeps.
    VerifyAlgebra,
    /// The 6-dimensional representation against the bracket table.
    VerifyRep,
    /// Zero curvature of one system.
    Verify {
        #[arg(value_enum)]
        target: Target,
    },
    /// Solve the positive hierarchy and compare with the printed table.
    DeriveMkdv,
    /// Miura factorization, Riccati form and gauge equivalence.
    MiuraCheck,
    /// Conserved densities from the column-2 recursion.
    Charges,
    /// Emit a table or matrix.
    Emit {
        #[arg(value_enum)]
        what: EmitTarget,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Liouville,
    Sinh,
    Cosh,
    Mkdv,
    Kdv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitTarget {
    StructureConstants,
    KdvMatrix,
    MkdvCoefficients,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum System {
    Kdv,
    Mkdv,
}

fn parse_epsilon(s: &str) -> Result<i8, String> {
    match s.trim() {
        "1" | "+1" => Ok(1),
        "-1" => Ok(-1),
        other => Err(format!("epsilon must be +1 or -1, got {other:?}")),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Lax(#[from] LaxError),
    #[error(transparent)]
    Charge(#[from] ChargeError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

/// Streams PASS/FAIL lines and counts them.
pub struct Reporter<'a> {
    out: &'a mut dyn Write,
    passed: usize,
    failed: usize,
}

impl<'a> Reporter<'a> {
    pub fn new(out: &'a mut dyn Write) -> Self {
        Reporter { out, passed: 0, failed: 0 }
    }

    pub fn check(&mut self, name: &str, ok: bool, residual: impl Display) -> io::Result<()> {
        if ok {
            self.passed += 1;
            writeln!(self.out, "PASS {name}")
        } else {
            self.failed += 1;
            writeln!(self.out, "FAIL {name}: {residual}")
        }
    }

    pub fn note(&mut self, text: impl Display) -> io::Result<()> {
        writeln!(self.out, "NOTE {text}")
    }

    pub fn raw(&mut self, text: impl Display) -> io::Result<()> {
        writeln!(self.out, "{text}")
    }

    pub fn failed(&self) -> usize {
        self.failed
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    command: &'a str,
    checks: usize,
    passed: usize,
    failed: usize,
}

fn command_name(c: &Command) -> String {
    match c {
        Command::VerifyAlgebra => "verify-algebra".into(),
        Command::VerifyRep => "verify-rep".into(),
        Command::Verify { target } => format!("verify {}", target_name(*target)),
        Command::DeriveMkdv => "derive-mkdv".into(),
        Command::MiuraCheck => "miura-check".into(),
        Command::Charges => "charges".into(),
        Command::Emit { what } => format!("emit {}", what.to_possible_value().expect("named").get_name()),
    }
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Liouville => "liouville",
        Target::Sinh => "sinh",
        Target::Cosh => "cosh",
        Target::Mkdv => "mkdv",
        Target::Kdv => "kdv",
    }
}

/// Runs one command and returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> i32 {
    let mut artifact = String::new();
    let mut rep = Reporter::new(out);
    let result = dispatch(cli, &mut rep, &mut artifact);
    let status = match result {
        Ok(()) => {
            let written = deliver(cli, &mut rep, &artifact);
            match written {
                Ok(()) if rep.failed == 0 => 0,
                Ok(()) => 1,
                Err(e) => {
                    let _ = rep.raw(format!("ERROR {e}"));
                    2
                }
            }
        }
        Err(e) => {
            let _ = rep.raw(format!("ERROR {e}"));
            2
        }
    };
    let name = command_name(&cli.command);
    let summary = Summary {
        command: &name,
        checks: rep.passed + rep.failed,
        passed: rep.passed,
        failed: rep.failed,
    };
    let _ = rep.raw(format!("SUMMARY {}", serde_json::to_string(&summary).expect("serializable")));
    status
}

fn deliver(cli: &Cli, rep: &mut Reporter<'_>, artifact: &str) -> Result<(), CliError> {
    if artifact.is_empty() {
        return Ok(());
    }
    match &cli.output {
        Some(path) => {
            fs::write(path, artifact)?;
            rep.note(format!("wrote {}", path.display()))?;
        }
        None => rep.raw(artifact.trim_end())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, rep: &mut Reporter<'_>, artifact: &mut String) -> Result<(), CliError> {
    match &cli.command {
        Command::VerifyAlgebra => verify_algebra(cli.mode_window, rep),
        Command::VerifyRep => {
            let r = verify_rep(cli.mode_window);
            let detail: Vec<String> = r.mismatches.iter().map(|m| format!("[{}, {}]", m.left, m.right)).collect();
            rep.check(
                &format!("representation ({} pairs, window {})", r.pairs_checked, cli.mode_window),
                r.passed(),
                detail.join(" "),
            )?;
            Ok(())
        }
        Command::Verify { target } => verify_system(*target, rep),
        Command::DeriveMkdv => derive_mkdv(cli.format, rep, artifact),
        Command::MiuraCheck => miura_check(rep),
        Command::Charges => charges(cli, rep, artifact),
        Command::Emit { what } => {
            *artifact = emit_target(*what, cli.format)?;
            Ok(())
        }
    }
}

fn verify_algebra(window: i64, rep: &mut Reporter<'_>) -> Result<(), CliError> {
    let (n, bad) = jacobi_sweep(window);
    let detail: Vec<String> = bad.iter().take(5).map(|(a, b, c)| format!("({a}, {b}, {c})")).collect();
    rep.check(&format!("graded Jacobi ({n} triples, window {window})"), bad.is_empty(), detail.join(" "))?;
    let bad = antisymmetry_sweep(window);
    let detail: Vec<String> = bad.iter().take(5).map(|(a, b)| format!("({a}, {b})")).collect();
    rep.check(&format!("graded antisymmetry (window {window})"), bad.is_empty(), detail.join(" "))?;
    let sweeps: Vec<_> = [Derivation::D00, Derivation::D11]
        .par_iter()
        .map(|&d| (d, derivation_sweep(d, window)))
        .collect();
    for (d, bad) in sweeps {
        let detail: Vec<String> = bad.iter().take(5).map(|(a, b)| format!("({a}, {b})")).collect();
        rep.check(&format!("derivation {d:?} (window {window})"), bad.is_empty(), detail.join(" "))?;
    }
    Ok(())
}

fn case_of(t: Target) -> Option<NegativeCase> {
    match t {
        Target::Liouville => Some(NegativeCase::Liouville),
        Target::Sinh => Some(NegativeCase::Sinh),
        Target::Cosh => Some(NegativeCase::Cosh),
        _ => None,
    }
}

fn verify_system(t: Target, rep: &mut Reporter<'_>) -> Result<(), CliError> {
    if let Some(case) = case_of(t) {
        let r = verify_negative_hierarchy(case)?;
        rep.check(&format!("{} zero curvature", case.name()), r.passed(), &r.residual)?;
        let (k, l) = case.constants();
        let (lp, lm) = build_negative_pair(k, l);
        let printed = verify_negative_with(case.name(), &lp, &lm, &printed_negative_eom(case))?;
        if !printed.passed() {
            let grades: Vec<String> = grade_decompose(&printed.residual).keys().map(|g| g.to_string()).collect();
            rep.note(format!(
                "the printed rho equations for {} leave a residual at principal grade {}; see README",
                case.name(),
                grades.join(", ")
            ))?;
        }
        return Ok(());
    }
    match t {
        Target::Mkdv => {
            let r = verify_mkdv()?;
            rep.check("mkdv zero curvature", r.passed(), &r.residual)?;
        }
        Target::Kdv => {
            let r = verify_kdv()?;
            rep.check("kdv zero curvature", r.passed(), &r.residual)?;
        }
        _ => unreachable!(),
    }
    Ok(())
}

fn derive_mkdv(format: Format, rep: &mut Reporter<'_>, artifact: &mut String) -> Result<(), CliError> {
    let sol = solve_positive_hierarchy()?;
    for (name, printed) in printed_mkdv_coefficients() {
        let got = sol.get(&name).cloned().unwrap_or_default();
        rep.check(&format!("coefficient {name}"), got == printed, &got - &printed)?;
    }
    let eom = crate::lax::mkdv_eom();
    for rule in eom.rules() {
        let got = sol.eom.rule(rule.field).map(|r| r.rhs.clone()).unwrap_or_default();
        rep.check(&format!("evolution of {}", rule.field), got == rule.rhs, &got - &rule.rhs)?;
    }
    *artifact = match format {
        Format::Json => serde_json::to_string_pretty(&emit::solution_json(&sol)).expect("serializable"),
        Format::Latex => emit::solution_latex(&sol),
        Format::Text => sol
            .coefficients
            .iter()
            .map(|(n, e)| format!("{n} = {e}\n"))
            .collect(),
    };
    Ok(())
}

fn miura_check(rep: &mut Reporter<'_>) -> Result<(), CliError> {
    let r = miura_factorization_check()?;
    for (n, e) in &r.identities {
        rep.check(&format!("factorization identity {n}"), e.is_zero(), e)?;
    }
    for (n, e) in &r.on_shell {
        rep.check(&format!("identity {n} vanishes on the mKdV shell"), e.is_zero(), e)?;
    }
    for (n, e) in &r.sigma_unchanged {
        rep.check(&format!("{n} equation unchanged"), e.is_zero(), e)?;
    }
    for (i, row) in riccati_form_check().iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            rep.check(&format!("riccati entry ({i},{j})"), e.is_zero(), e)?;
        }
    }
    let g = gauge_check()?;
    rep.check("gauge image of L_x", g.lx_difference.is_zero(), &g.lx_difference)?;
    rep.check("gauge image of L_t", g.lt_difference.is_zero(), &g.lt_difference)?;
    let k = verify_kdv()?;
    rep.check("kdv zero curvature", k.passed(), &k.residual)?;
    Ok(())
}

fn charges(cli: &Cli, rep: &mut Reporter<'_>, artifact: &mut String) -> Result<(), CliError> {
    let col = gamma_solve(cli.order, cli.epsilon)?;
    let res = gamma_residuals(&col);
    let bad: Vec<String> = res
        .iter()
        .filter(|r| !r.residual.is_zero())
        .map(|r| format!("row {} lambda^{}: {}", r.row, r.power, r.residual))
        .collect();
    rep.check(
        &format!("recursion residuals ({} coefficients, epsilon {:+})", res.len(), cli.epsilon),
        bad.is_empty(),
        bad.join("; "),
    )?;
    let mut ds = extract_densities(&col)?;
    ds.retain(|d| !d.is_trivial());
    let (eom, printed): (EomSystem, Vec<_>) = match cli.system {
        System::Kdv => (kdv_eom(), printed_kdv_charges()),
        System::Mkdv => {
            ds = ds.iter().map(map_charges_via_miura).collect::<Result<_, _>>()?;
            (crate::lax::mkdv_eom(), printed_mkdv_charges())
        }
    };
    let checks: Vec<(usize, Result<bool, RingError>)> =
        ds.par_iter().map(|d| (d.order, verify_conservation(d, &eom))).collect();
    for (order, ok) in checks {
        rep.check(&format!("density of order {order} is conserved"), ok?, "not a total derivative")?;
    }
    for (order, p) in printed {
        if let Some(d) = ds.iter().find(|d| d.order == order) {
            let k = proportional_mod_dx(&d.density, &p)?;
            rep.check(
                &format!("order {order} matches the printed charge up to scale"),
                k.is_some_and(|k| k != crate::coeff::Coeff::int(0)),
                &d.density,
            )?;
        }
    }
    let g = graded_charge_checks()?;
    match cli.system {
        System::Mkdv => {
            rep.check("dt u11 = b11'", g.mkdv_flux_minus_b11_prime.is_zero(), &g.mkdv_flux_minus_b11_prime)?;
            rep.check("[11] charge u11 conserved", g.mkdv_u11_conserved, "not conserved")?;
        }
        System::Kdv => {
            rep.check("U11 - i Sigma11 conserved", g.kdv_density_conserved, "not conserved")?;
            rep.check(
                "U11 - i Sigma11 = 2 dx G32^(2), so its charge vanishes",
                g.kdv_density_minus_total.is_zero(),
                &g.kdv_density_minus_total,
            )?;
        }
    }
    *artifact = render_densities(&ds, cli.format);
    Ok(())
}

fn render_densities(ds: &[ConservedDensity], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&emit::densities_json(ds)).expect("serializable"),
        Format::Latex => emit::densities_latex(ds),
        Format::Text => ds
            .iter()
            .map(|d| format!("order {} grade {}: {}\n", d.order, d.grade, d.density))
            .collect(),
    }
}

fn emit_target(what: EmitTarget, format: Format) -> Result<String, CliError> {
    Ok(match (what, format) {
        (EmitTarget::StructureConstants, Format::Json) => {
            serde_json::to_string_pretty(&structure_constants()).expect("serializable")
        }
        (EmitTarget::StructureConstants, Format::Latex) => latex_table(),
        (EmitTarget::StructureConstants, Format::Text) => structure_constants()
            .iter()
            .map(|s| {
                let mode = match s.mode_offset {
                    0 => "m+n".to_string(),
                    k if k > 0 => format!("m+n+{k}"),
                    k => format!("m+n{k}"),
                };
                format!("[{}_m, {}_n] = {} {}_({mode})\n", s.left, s.right, s.coeff, s.result)
            })
            .collect(),
        (EmitTarget::KdvMatrix, Format::Json) => {
            serde_json::to_string_pretty(&emit::matrix_json(&lax_matrix_kdv())).expect("serializable")
        }
        (EmitTarget::KdvMatrix, _) => emit::latex_matrix(&lax_matrix_kdv()),
        (EmitTarget::MkdvCoefficients, _) => {
            let sol = solve_positive_hierarchy()?;
            match format {
                Format::Json => serde_json::to_string_pretty(&emit::solution_json(&sol)).expect("serializable"),
                _ => emit::solution_latex(&sol),
            }
        }
    })
}

/// Configures the global worker pool from [`THREADS_ENV`].
pub fn init_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::Usage(format!("{THREADS_ENV} must be positive")));
        }
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}
