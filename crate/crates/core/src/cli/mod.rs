//! The `pdnf` command-line front end.

pub mod report;
pub mod selfcheck;
pub mod system;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::algebra::{ExactMatrix, GaussianRational, PolyVectorField};
use crate::convergence::{convergence_report, poincare_criterion, SymmetryData};
use crate::normalform::{
    complexify, realify, verify_normal_form, ComplexificationMap, NormalFormError, NormalFormResult,
};
use crate::numerics::{orbit_space_demo, phase_velocity, truncation_scaling, ScalingFit};
use crate::resonance::{analyze, resonance_degree_bound, Spectrum, DEFAULT_HILBERT_CAP};
use crate::symmetry::{
    covariant_dimension, gradient_property_check, invariant_dimension, joint_centralizer, molien_coefficients,
    normalize_equivariant, symmetric_invariants, FiniteGroup,
};
use crate::unfold::{asymptotic_linearization, build_unfolding, verify_unfolding, UnfoldedSystem};

pub use system::{parse_system, serialize, ParseError, SystemFile};

use report::Report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "pdnf", version, about = "Poincare-Dulac normal forms in exact arithmetic")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Truncation order.
    #[arg(long, global = true, default_value_t = 5)]
    pub order: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Largest k in the small-divisor table.
    #[arg(long = "omega-kmax", global = true, default_value_t = 4)]
    pub omega_kmax: u32,
    /// Degree cap for the invariance-basis completion.
    #[arg(long = "hilbert-cap", global = true, default_value_t = DEFAULT_HILBERT_CAP)]
    pub hilbert_cap: u32,
    /// Comma-separated amplitudes for `scaling`.
    #[arg(long = "eps-list", global = true, value_delimiter = ',', default_value = "0.02,0.04,0.08,0.16")]
    pub eps_list: Vec<f64>,
    /// Integration horizon (default 1 for `scaling`, 20 for `simulate`).
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random cases for `selfcheck`.
    #[arg(long, global = true, default_value_t = 200)]
    pub cases: usize,
    /// Comma-separated initial state in file coordinates for `simulate`.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub x0: Option<Vec<f64>>,
    /// Comma-separated orbit-space point for `asymptotic`.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub point: Option<Vec<String>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resonances, invariance basis, sporadic resonances.
    Analyze { file: PathBuf },
    /// Normal form, transform and exact verification.
    Normalize { file: PathBuf },
    /// Unfolded (x, w, phi) system and back-substitution check.
    Unfold { file: PathBuf },
    /// Orbit-space fixed points and frozen linear systems.
    Asymptotic { file: PathBuf },
    /// Centralizers, equivariance and symmetric invariants.
    Symmetry { file: PathBuf },
    /// Molien counts against projector ranks, gradient property.
    Molien { file: PathBuf },
    /// Convergence diagnostics.
    Convergence { file: PathBuf },
    /// Orbit-space integration against the normal form.
    Simulate { file: PathBuf },
    /// Conjugacy error scaling fit.
    Scaling { file: PathBuf },
    /// Seeded randomized property checks.
    Selfcheck,
    /// Print the canonical form of a system file.
    Format { file: PathBuf },
}

impl Command {
    pub fn file(&self) -> Option<&PathBuf> {
        match self {
            Command::Selfcheck => None,
            Command::Analyze { file }
            | Command::Normalize { file }
            | Command::Unfold { file }
            | Command::Asymptotic { file }
            | Command::Symmetry { file }
            | Command::Molien { file }
            | Command::Convergence { file }
            | Command::Simulate { file }
            | Command::Scaling { file }
            | Command::Format { file } => Some(file),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{0}")]
    Input(String),
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

/// A system prepared for the pipelines: complexified field, spectrum and
/// group in working coordinates.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub sys: SystemFile,
    pub field: PolyVectorField,
    pub working: PolyVectorField,
    pub spectrum: Spectrum,
    pub map: ComplexificationMap,
    /// Linear part commutes with, but differs from, `diag(spectrum)`.
    pub detuned: bool,
    pub group: Option<FiniteGroup>,
    pub group_file: Option<FiniteGroup>,
}

/// With `allow_detuned`, declared eigenvalues may differ from the linear
/// part as long as the two commute; otherwise a mismatch is an error.
pub fn prepare(sys: &SystemFile, allow_detuned: bool) -> Result<Prepared, CliError> {
    let field = sys.field();
    let n = sys.dim;
    let blocks = sys.rotation_blocks();
    let (working, inferred, map) = if blocks.is_empty() {
        let lin = field.linear_part();
        let inferred = if lin.is_diagonal() { Spectrum::new(lin.diag()).ok() } else { None };
        (field.clone(), inferred, ComplexificationMap::identity(n))
    } else {
        let (g, s, map) = complexify(&field, &blocks).map_err(CliError::input)?;
        (g, Some(s), map)
    };
    let (spectrum, detuned) = match (&sys.eigenvalues, inferred) {
        (None, Some(s)) => (s, false),
        (None, None) => {
            return Err(CliError::Input(
                "linear part is not diagonal and no eigenvalues are declared".into(),
            ))
        }
        (Some(ev), inferred) => {
            let declared = Spectrum::new(ev.clone()).map_err(CliError::input)?;
            match inferred {
                Some(s) if s == declared => (declared, false),
                _ => {
                    let a_s = ExactMatrix::diagonal(declared.eigenvalues());
                    if allow_detuned && working.linear_part().commutes_with(&a_s) {
                        (declared, true)
                    } else {
                        return Err(CliError::Input(format!(
                            "declared eigenvalues [{}] do not match the linear part",
                            report::list(declared.eigenvalues())
                        )));
                    }
                }
            }
        }
    };
    let group_file = if sys.group_elements.is_empty() && sys.group_generators.is_empty() {
        None
    } else if sys.group_generators.is_empty() {
        Some(FiniteGroup::new(sys.group_elements.clone()).map_err(CliError::input)?)
    } else {
        let mut gens = sys.group_generators.clone();
        gens.extend(sys.group_elements.iter().cloned());
        Some(FiniteGroup::generate(n, &gens).map_err(CliError::input)?)
    };
    let group = group_file.as_ref().map(|g| g.conjugated(&map.forward, &map.backward));
    Ok(Prepared { sys: sys.clone(), field, working, spectrum, map, detuned, group, group_file })
}

/// Normal form of the working field: the normalizer, or the field itself
/// when it is detuned and already resonant.
pub fn normal_form_of(p: &Prepared, order: u32) -> Result<NormalFormResult, CliError> {
    if p.detuned {
        return NormalFormResult::already_normal(&p.working, &p.spectrum, order).map_err(|e| match e {
            NormalFormError::NotResonant { .. } => CliError::Input(format!(
                "detuned linear part requires a field already in normal form: {e}"
            )),
            other => CliError::input(other),
        });
    }
    match &p.group {
        Some(g) => normalize_equivariant(&p.working, &p.spectrum, g, order).map_err(CliError::input),
        None => crate::normalform::normalize(&p.working, &p.spectrum, order).map_err(CliError::input),
    }
}

fn load(path: &PathBuf) -> Result<SystemFile, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    parse_system(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

/// Parses arguments, runs one command and writes its report to `out`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(rep) => {
            let _ = match cli.format {
                Format::Text => write!(out, "{}", rep.text),
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&rep.json).expect("serializable")),
            };
            if rep.verified {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    match cli.command.file() {
        None => execute_on(cli, None),
        Some(file) => execute_on(cli, Some(&load(file)?)),
    }
}

/// Runs `cli.command` on an already parsed system; the command's file
/// argument is ignored.
pub fn execute_on(cli: &Cli, sys: Option<&SystemFile>) -> Result<Report, CliError> {
    let Some(sys) = sys else {
        return match cli.command {
            Command::Selfcheck => Ok(cmd_selfcheck(cli)),
            _ => Err(CliError::Input("command needs a system".into())),
        };
    };
    match &cli.command {
        Command::Selfcheck => Ok(cmd_selfcheck(cli)),
        Command::Format { .. } => {
            let text = serialize(sys);
            Ok(Report::new(text.clone(), json!({ "system": text }), true))
        }
        Command::Analyze { .. } => cmd_analyze(cli, &prepare(sys, true)?),
        Command::Normalize { .. } => cmd_normalize(cli, &prepare(sys, false)?),
        Command::Unfold { .. } => cmd_unfold(cli, &prepare(sys, true)?),
        Command::Asymptotic { .. } => cmd_asymptotic(cli, &prepare(sys, true)?),
        Command::Symmetry { .. } => cmd_symmetry(cli, &prepare(sys, true)?),
        Command::Molien { .. } => cmd_molien(cli, &prepare(sys, true)?),
        Command::Convergence { .. } => cmd_convergence(cli, &prepare(sys, true)?),
        Command::Simulate { .. } => cmd_simulate(cli, &prepare(sys, true)?),
        Command::Scaling { .. } => cmd_scaling(cli, &prepare(sys, false)?),
    }
}

fn cmd_analyze(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let rep = analyze(&p.spectrum, cli.order, cli.hilbert_cap).map_err(CliError::input)?;
    let poincare = poincare_criterion(&p.spectrum);
    let bound = resonance_degree_bound(&p.spectrum);
    let mut r = report::analysis(&rep, poincare, bound);
    r.prepend_header(p);
    Ok(r)
}

fn cmd_normalize(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    normalize_report(p, cli.order).map(|(_, rep)| rep)
}

/// The normal form together with its verified report.
pub fn normalize_report(p: &Prepared, order: u32) -> Result<(NormalFormResult, Report), CliError> {
    let r = normal_form_of(p, order)?;
    let ver = verify_normal_form(&r).map_err(CliError::input)?;
    let real = if p.map.is_identity() { None } else { Some(realify(&r, &p.map)) };
    let mut rep = report::normal_form(&r, &ver, real.as_ref());
    rep.prepend_header(p);
    Ok((r, rep))
}

fn unfolded(cli: &Cli, p: &Prepared) -> Result<(NormalFormResult, UnfoldedSystem), CliError> {
    let r = normal_form_of(p, cli.order)?;
    let rep = analyze(&p.spectrum, cli.order, cli.hilbert_cap).map_err(CliError::input)?;
    let u = build_unfolding(&r, &rep).map_err(CliError::input)?;
    Ok((r, u))
}

fn cmd_unfold(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let (r, u) = unfolded(cli, p)?;
    let chk = verify_unfolding(&u, &r.normal_form);
    let mut rep = report::unfolding(&u, &chk);
    rep.prepend_header(p);
    Ok(rep)
}

fn parse_point(items: &[String]) -> Result<Vec<GaussianRational>, CliError> {
    items.iter().map(|s| s.parse().map_err(CliError::input)).collect()
}

fn cmd_asymptotic(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let (r, u) = unfolded(cli, p)?;
    let chk = verify_unfolding(&u, &r.normal_form);
    let point = cli.point.as_deref().map(parse_point).transpose()?;
    let asym = asymptotic_linearization(&u, point.as_deref()).map_err(CliError::input)?;
    let mut rep = report::asymptotics(&u, &asym);
    rep.verified &= chk.ok();
    rep.prepend_header(p);
    Ok(rep)
}

fn cmd_symmetry(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let a = p.working.linear_part();
    let cent = joint_centralizer(std::slice::from_ref(&a));
    let mut joint = None;
    let mut invariants = None;
    let mut equivariant = None;
    if let Some(g) = &p.group {
        let mut mats = vec![a.clone()];
        mats.extend(g.elements().iter().cloned());
        joint = Some(joint_centralizer(&mats).len());
        equivariant = Some(g.is_equivariant(&p.working));
        invariants = Some(symmetric_invariants(g, &p.spectrum, cli.order).map_err(CliError::input)?);
    }
    let commuting: Vec<(bool, PolyVectorField)> = p
        .sys
        .commuting
        .iter()
        .map(|b| crate::symmetry::equivariance_check(&p.field, b))
        .collect();
    let mut rep = report::symmetry(cent.len(), joint, equivariant, invariants.as_deref(), &commuting, p.group.as_ref());
    rep.prepend_header(p);
    Ok(rep)
}

fn cmd_molien(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let g = p.group_file.as_ref().ok_or_else(|| CliError::Input("molien needs a group block".into()))?;
    let table = molien_coefficients(g, cli.order + 1).map_err(CliError::input)?;
    let brute: Vec<(usize, usize)> =
        (0..=cli.order).map(|n| (invariant_dimension(g, n), covariant_dimension(g, n))).collect();
    let k_basis = joint_centralizer(g.elements());
    let grad = gradient_property_check(g, cli.order, &k_basis).map_err(CliError::input)?;
    let mut rep = report::molien(g, &table, &brute, &grad, cli.order);
    rep.prepend_header(p);
    Ok(rep)
}

fn cmd_convergence(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let r = normal_form_of(p, cli.order)?;
    let sym = p
        .sys
        .commuting
        .first()
        .map(|b| SymmetryData { linear_part: &(&p.map.forward * b) * &p.map.backward });
    let c = convergence_report(&r, sym.as_ref(), cli.omega_kmax);
    let mut rep = report::convergence(&c, cli.omega_kmax);
    rep.prepend_header(p);
    Ok(rep)
}

fn cmd_simulate(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    let (r, u) = unfolded(cli, p)?;
    let n = p.sys.dim;
    let x0 = match &cli.x0 {
        Some(v) if v.len() == n => v.clone(),
        Some(v) => return Err(CliError::Input(format!("--x0 has {} entries, system has {n}", v.len()))),
        None => {
            let mut v = vec![0.0; n];
            v[0] = 0.1;
            v
        }
    };
    let xr: Vec<Complex64> = x0.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let z0: Vec<Complex64> =
        (0..n).map(|i| (0..n).map(|j| p.map.forward.get(i, j).to_complex64() * xr[j]).sum()).collect();
    let state0 = u.lift_point(&z0);
    let t_end = cli.horizon.unwrap_or(20.0);
    let demo = orbit_space_demo(&u, &r.normal_form, &state0, t_end, cli.dt).map_err(CliError::input)?;
    let freqs: Vec<Option<f64>> = (0..n).map(|i| phase_velocity(&demo.linear, i, t_end / 2.0)).collect();
    let mut rep = report::simulation(&x0, t_end, &demo, &freqs);
    rep.prepend_header(p);
    Ok(rep)
}

fn cmd_scaling(cli: &Cli, p: &Prepared) -> Result<Report, CliError> {
    if cli.eps_list.len() < 4 {
        return Err(CliError::Input("--eps-list needs at least four amplitudes".into()));
    }
    let r = normal_form_of(p, cli.order)?;
    let t_end = cli.horizon.unwrap_or(1.0);
    let sc = truncation_scaling(&p.working, &r, &cli.eps_list, t_end, cli.dt).map_err(CliError::input)?;
    let mut rep = report::scaling(&sc, cli.order, t_end, cli.dt);
    rep.verified = !matches!(sc.fit, ScalingFit::NoFit);
    rep.prepend_header(p);
    Ok(rep)
}

fn cmd_selfcheck(cli: &Cli) -> Report {
    let suite = selfcheck::property_suite(cli.seed, cli.cases);
    let mut text = format!("seed: {}\ncases: {}\n", suite.seed, suite.cases);
    let mut props = Vec::new();
    for t in &suite.properties {
        let status = if t.failed == 0 { "pass" } else { "FAIL" };
        text.push_str(&format!("{status} {}: {}/{}", t.name, t.passed, t.passed + t.failed));
        if let Some(c) = t.first_failure {
            text.push_str(&format!(" (first failure at case {c})"));
        }
        text.push('\n');
        props.push(json!({
            "name": t.name, "passed": t.passed, "failed": t.failed, "first_failure": t.first_failure,
        }));
    }
    let ok = suite.ok();
    Report::new(text, json!({ "seed": suite.seed, "cases": suite.cases, "properties": props, "ok": ok }), ok)
}

pub(crate) fn spectrum_json(s: &Spectrum) -> Value {
    Value::Array(s.eigenvalues().iter().map(|e| Value::String(e.to_string())).collect())
}
