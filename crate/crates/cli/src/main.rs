//! `solenoid`: batch driver for the certified Navier-Stokes library.
//!
//! Every command writes one JSON document with `"schema": "solenoid/1"`.
//! Diagnostics go to standard error as `solenoid:error:<kind>: <message>`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use solenoid_core::approxcore::{BoundedValue, ConstantsTable, Ledger, Rational};
use solenoid_core::helmholtz::{project_with, ProjectMode, VectorFieldName};
use solenoid_core::nse::{compute_horizon, pressure, EngineConfig, PressureQuery, Solver};
use solenoid_core::polyfield::solenoidal::enumerate_u64;
use solenoid_core::polyfield::{check_solenoidal, kernel_pairs, MollifiedElement, PolyPair};
use solenoid_core::spectral::{Basis, PairField, SobolevName, SourceSpec};
use solenoid_core::stokes::{frac_power_apply, semigroup_apply};
use solenoid_core::{Error, Result};

pub const SCHEMA: &str = "solenoid/1";
/// Environment variable naming a constants-table override file.
pub const CONSTANTS_ENV: &str = "SOLENOID_CONSTANTS";

const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_HORIZON: u8 = 4;
const EXIT_BUDGET: u8 = 5;
const EXIT_SELFTEST: u8 = 6;

#[derive(Parser, Debug)]
#[command(name = "solenoid", version, about = "Certified mild solutions of 2D Navier-Stokes on the unit square")]
pub struct RunConfig {
    /// Output path; standard output when absent.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Constants table JSON; overrides the environment variable.
    #[arg(long, global = true)]
    constants: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct Caps {
    /// Mode cap of the Picard engine.
    #[arg(long, default_value_t = 12)]
    mode_cap: usize,
    /// Taylor-model degree.
    #[arg(long, default_value_t = 10)]
    degree: usize,
    /// Initial time panels.
    #[arg(long, default_value_t = 8)]
    panels: usize,
    /// Panel cap for refinement.
    #[arg(long, default_value_t = 256)]
    max_panels: usize,
}

impl Caps {
    fn config(&self) -> Result<EngineConfig> {
        if self.mode_cap == 0 || self.degree == 0 || self.panels == 0 || self.max_panels < self.panels {
            return Err(Error::Precondition("caps must be positive and max-panels ≥ panels".into()));
        }
        Ok(EngineConfig { cap: self.mode_cap, degree: self.degree, panels: self.panels, max_panels: self.max_panels })
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PathKind {
    XThenY,
    YThenX,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exactly solenoidal polynomial pairs vanishing on the boundary.
    Basis {
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        count: usize,
    },
    /// Helmholtz projection to precision 2^-K.
    Project {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        precision: u32,
        /// Use the dense-set search with at most this many candidates.
        #[arg(long)]
        search_cap: Option<u64>,
    },
    /// Stokes semigroup e^{-tA}.
    Semigroup {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        precision: u32,
        /// Mode coefficients as CSV for external plotting.
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
    /// Fractional power A^alpha.
    Fracpower {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long)]
        precision: u32,
    },
    /// Picard horizon certificate.
    Horizon {
        #[arg(long)]
        input: PathBuf,
    },
    /// Mild solution at time t.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long)]
        precision: u32,
        #[command(flatten)]
        caps: Caps,
        #[arg(long)]
        emit_csv: Option<PathBuf>,
    },
    /// Pressure difference between the origin and (x, y).
    Pressure {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        #[arg(long)]
        precision: u32,
        #[arg(long, value_enum, default_value = "x-then-y")]
        path: PathKind,
        #[command(flatten)]
        caps: Caps,
    },
    /// Fixed battery of checks with a deterministic artifact.
    Selftest,
}

/// A field given by exact mode coefficients in the pair basis.
#[derive(Deserialize, Debug)]
struct ModeEntry {
    n: i64,
    m: i64,
    u1: Rational,
    u2: Rational,
}

#[derive(Deserialize, Debug, Default)]
struct FieldSpec {
    cutoff: Option<usize>,
    modes: Option<Vec<ModeEntry>>,
    /// A mollified dense-set element.
    element: Option<MollifiedElement>,
    /// A serialized band-limited pair field.
    field: Option<PairField>,
}

#[derive(Deserialize, Debug)]
struct InputFile {
    schema: String,
    #[serde(flatten)]
    datum: FieldSpec,
    forcing: Option<FieldSpec>,
}

/// Cutoff ceiling when resolving element names.
const ELEMENT_MAX_CUTOFF: usize = 128;

/// Smoothness asked of element names by the nonlinear commands.
fn h65() -> Rational {
    Rational::new(6, 5)
}

fn exact(r: &Rational) -> BoundedValue {
    BoundedValue::from_rational(r)
}

impl FieldSpec {
    fn kinds(&self) -> usize {
        self.modes.is_some() as usize + self.element.is_some() as usize + self.field.is_some() as usize
    }

    fn pair(&self) -> Result<Option<PairField>> {
        if let Some(f) = &self.field {
            if !f.is_band_limited() {
                return Err(Error::Precondition("input fields must be band-limited".into()));
            }
            return Ok(Some(f.clone()));
        }
        let Some(modes) = &self.modes else { return Ok(None) };
        let need = modes.iter().map(|e| e.n.unsigned_abs().max(e.m.unsigned_abs()) as usize).max().unwrap_or(0);
        let cutoff = self.cutoff.unwrap_or(need.max(1));
        if cutoff < need {
            return Err(Error::Precondition(format!("cutoff {cutoff} below mode index {need}")));
        }
        let mut f = PairField::zeros(cutoff);
        for e in modes {
            if e.n < 0 || e.m < 0 {
                return Err(Error::Precondition(format!("mode ({}, {}) has a negative index", e.n, e.m)));
            }
            f.set(e.n, e.m, exact(&e.u1), exact(&e.u2))?;
        }
        Ok(Some(f))
    }

    /// Name of the field; element names resolve in `H^s`.
    fn name(&self, s: Rational) -> Result<VectorFieldName> {
        if self.kinds() != 1 {
            return Err(Error::Parse("give exactly one of \"modes\", \"element\", \"field\"".into()));
        }
        if let Some(p) = self.pair()? {
            return VectorFieldName::from_pair(&p);
        }
        let e = self.element.as_ref().expect("one kind present");
        let comp = |c: usize, basis: Basis| {
            let spec = SourceSpec::Mollified { poly: e.base().pair().component(c).clone(), k: e.k(), n: e.n() };
            SobolevName::from_source(spec, basis, s.clone(), 8, ELEMENT_MAX_CUTOFF)
        };
        VectorFieldName::new(comp(0, Basis::SIN_COS)?, comp(1, Basis::COS_SIN)?)
    }
}

fn read_input(path: &Path) -> Result<InputFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let inp: InputFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    if inp.schema != SCHEMA {
        return Err(Error::Parse(format!("schema {:?}, expected {SCHEMA:?}", inp.schema)));
    }
    Ok(inp)
}

fn forcing(inp: &InputFile) -> Result<Option<PairField>> {
    match &inp.forcing {
        None => Ok(None),
        Some(f) if f.element.is_some() => Err(Error::Precondition("forcing must be given by modes or a field".into())),
        Some(f) => f.pair(),
    }
}

fn parse_rational(what: &str, s: &str) -> Result<Rational> {
    s.parse::<Rational>().map_err(|e| Error::Parse(format!("--{what}: {e}")))
}

fn parse_time(s: &str) -> Result<Rational> {
    let t = parse_rational("t", s)?;
    if t < Rational::zero() {
        return Err(Error::Precondition(format!("t must be nonnegative, got {t}")));
    }
    Ok(t)
}

fn check_precision(k: u32) -> Result<()> {
    if k == 0 || k > 60 {
        return Err(Error::Precondition(format!("precision must lie in 1..=60, got {k}")));
    }
    Ok(())
}

fn constants(flag: Option<&Path>) -> Result<ConstantsTable> {
    let path = flag.map(Path::to_path_buf).or_else(|| std::env::var_os(CONSTANTS_ENV).map(PathBuf::from));
    match path {
        None => Ok(ConstantsTable::default_table()),
        Some(p) => {
            let text = fs::read_to_string(&p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))?;
            ConstantsTable::from_json(&text)
        }
    }
}

fn certificate(k: u32, ledger: &Ledger) -> Value {
    let target = -(k as i32);
    json!({
        "target_log2": target,
        "lines": ledger.lines,
        "total": ledger.total(),
        "closes": ledger.closes(target),
    })
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Domain(format!("serialization: {e}")))
}

fn write_csv(path: &Path, f: &PairField) -> Result<()> {
    let mut s = String::from("n,m,u1_center,u1_radius,u2_center,u2_radius\n");
    for (n, m) in f.modes() {
        let (a, b) = f.coeffs(n, m);
        if a == BoundedValue::ZERO && b == BoundedValue::ZERO {
            continue;
        }
        s.push_str(&format!("{n},{m},{:e},{:e},{:e},{:e}\n", a.mid(), a.rad(), b.mid(), b.rad()));
    }
    fs::write(path, s).map_err(|e| Error::Domain(format!("{}: {e}", path.display())))
}

/// Divergence coefficients of a pair field all enclose zero.
fn divergence_encloses_zero(f: &PairField) -> bool {
    let d = f.divergence_coeffs();
    let ok = d.modes().all(|(n, m)| {
        let (re, im) = d.coeff(n, m);
        re.contains(0.0) && im.contains(0.0)
    });
    ok
}

/// Enumeration indices scanned before `basis` gives up.
const BASIS_SCAN: u64 = 1 << 20;

/// The first `count` distinct nonzero elements of the rational solenoidal
/// enumeration with degree at most `degree`.
fn cmd_basis(degree: usize, count: usize) -> Result<Value> {
    if degree == 0 || degree > 12 {
        return Err(Error::Precondition(format!("degree must lie in 1..=12, got {degree}")));
    }
    let dim = kernel_pairs(degree).len();
    if dim == 0 && count > 0 {
        return Err(Error::Precondition(format!("no nonzero solenoidal pairs vanish on the boundary at degree {degree}")));
    }
    let mut seen = std::collections::HashSet::new();
    let mut elems = Vec::new();
    let mut i = 1u64;
    while elems.len() < count {
        if i > BASIS_SCAN {
            return Err(Error::BudgetNotMet(format!("found {} of {count} elements in {BASIS_SCAN} indices", elems.len())));
        }
        let p = enumerate_u64(i);
        if !p.is_zero() && p.degree() <= degree {
            let key = serde_json::to_string(p.pair()).expect("pairs serialize");
            if seen.insert(key) {
                elems.push(json!({ "index": i, "pair": p.pair(), "checks": basis_checks(p.pair()) }));
            }
        }
        i += 1;
    }
    Ok(json!({ "degree": degree, "kernel_dimension": dim, "elements": elems }))
}

fn basis_checks(p: &PolyPair) -> Value {
    let one = Rational::one();
    let neg = -Rational::one();
    let div = p.divergence().is_zero();
    let vanish = |c: usize| {
        let q = p.component(c);
        [&one, &neg].iter().all(|v| q.restrict_x(v).iter().all(Rational::is_zero) && q.restrict_y(v).iter().all(Rational::is_zero))
    };
    json!({
        "divergence_free": div,
        "u1_vanishes_on_boundary": vanish(0),
        "u2_vanishes_on_boundary": vanish(1),
        "constraint_rows_zero": check_solenoidal(p),
    })
}

fn cmd_project(inp: &InputFile, k: u32, search_cap: Option<u64>) -> Result<Value> {
    check_precision(k)?;
    let name = inp.datum.name(Rational::zero())?;
    let mode = match search_cap {
        Some(cap) => ProjectMode::Search { cap },
        None => ProjectMode::Constructive,
    };
    let out = project_with(&name, k, mode)?;
    let mut ledger = Ledger::new();
    ledger.push("projection/l2-uncertainty", -(k as i32), out.uncertainty());
    Ok(json!({
        "field": to_value(&out)?,
        "divergence_encloses_zero": divergence_encloses_zero(&out),
        "certificate": certificate(k, &ledger),
    }))
}

/// Approximant refinement shared by linear commands: ask the name for
/// `k + extra` digits until `apply` meets `2^{-k}`.
fn refine(name: &VectorFieldName, k: u32, apply: impl Fn(&PairField, u32) -> Result<PairField>) -> Result<(PairField, u32)> {
    let mut last = f64::INFINITY;
    for extra in (2..=22).step_by(4) {
        let q = name.approx(k + extra)?;
        let out = apply(&q, k + extra - 1)?;
        let u = out.uncertainty();
        if u <= 2f64.powi(-(k as i32)) {
            return Ok((out, k + extra));
        }
        last = u;
    }
    Err(Error::BudgetNotMet(format!("output uncertainty {last:e} above 2^-{k}")))
}

fn cmd_semigroup(inp: &InputFile, t: &Rational, k: u32, csv: Option<&Path>) -> Result<Value> {
    check_precision(k)?;
    let name = inp.datum.name(Rational::zero())?;
    let tb = exact(t);
    let (out, used) = refine(&name, k, |q, kk| Ok(semigroup_apply(q, tb, kk)?.0))?;
    let report = semigroup_apply(&name.approx(used)?, tb, used - 1)?.1;
    if let Some(p) = csv {
        write_csv(p, &out)?;
    }
    let mut ledger = Ledger::new();
    ledger.push("semigroup/l2-uncertainty", -(k as i32), out.uncertainty());
    Ok(json!({
        "t": t,
        "field": to_value(&out)?,
        "report": to_value(&report)?,
        "approximant_precision": used,
        "certificate": certificate(k, &ledger),
    }))
}

fn cmd_fracpower(inp: &InputFile, alpha: &Rational, k: u32) -> Result<Value> {
    check_precision(k)?;
    // A^α is bounded from H^{2α} to L₂
    let name = inp.datum.name(alpha + alpha)?;
    let (out, used) = refine(&name, k, |q, _| frac_power_apply(q, alpha))?;
    let mut ledger = Ledger::new();
    ledger.push("fracpower/l2-uncertainty", -(k as i32), out.uncertainty());
    Ok(json!({
        "alpha": alpha,
        "field": to_value(&out)?,
        "approximant_precision": used,
        "certificate": certificate(k, &ledger),
    }))
}

fn cmd_horizon(inp: &InputFile, table: &ConstantsTable) -> Result<Value> {
    let name = inp.datum.name(h65())?;
    let g = forcing(inp)?.map(|f| solenoid_core::helmholtz::project_field(&f));
    let cert = compute_horizon(&name, g.as_ref(), table)?;
    let below_one = cert.epsilon.hi() < 1.0;
    Ok(json!({ "certificate": to_value(&cert)?, "epsilon_below_one": below_one }))
}

fn solver(inp: &InputFile, table: &ConstantsTable, caps: &Caps) -> Result<(Solver, Option<PairField>)> {
    let f = forcing(inp)?;
    let s = Solver::new(inp.datum.name(h65())?, f.as_ref(), table, caps.config()?)?;
    Ok((s, f))
}

fn cmd_solve(inp: &InputFile, table: &ConstantsTable, t: &Rational, k: u32, caps: &Caps, csv: Option<&Path>) -> Result<Value> {
    check_precision(k)?;
    let (s, _) = solver(inp, table, caps)?;
    let out = s.solve(t, k)?;
    if let Some(p) = csv {
        write_csv(p, &out.field)?;
    }
    Ok(json!({
        "t": t,
        "horizon": s.cert.t_a,
        "iterate": out.m,
        "geometric_tail": out.geometric_tail,
        "a35_error": out.a35_error,
        "field": to_value(&out.field)?,
        "certificate": certificate(k, &out.ledger),
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_pressure(inp: &InputFile, table: &ConstantsTable, t: &Rational, x: &Rational, y: &Rational, k: u32, path: PathKind, caps: &Caps) -> Result<Value> {
    check_precision(k)?;
    let inside = |v: &Rational| *v >= Rational::zero() && *v <= Rational::one();
    if !inside(x) || !inside(y) {
        return Err(Error::Precondition(format!("({x}, {y}) lies outside the unit square")));
    }
    let (s, f) = solver(inp, table, caps)?;
    let q = match path {
        PathKind::XThenY => PressureQuery::x_then_y(x.clone(), y.clone(), t.clone()),
        PathKind::YThenX => PressureQuery::y_then_x(x.clone(), y.clone(), t.clone()),
    };
    let out = pressure(&s, f.as_ref(), &q, k)?;
    let mut ledger = Ledger::new();
    ledger.push("pressure/enclosure-width", -(k as i32), out.value.width());
    Ok(json!({
        "query": to_value(&q)?,
        "value": to_value(&out.value)?,
        "potential": to_value(&out.potential)?,
        "error_bound": out.error_bound,
        "solve_precision": out.solve_precision,
        "certificate": certificate(k, &ledger),
    }))
}

/// Fixed checks; the artifact depends only on the code.
fn cmd_selftest() -> Result<(Value, bool)> {
    let mut checks = Vec::new();
    let mut all = true;
    let mut record = |name: &str, pass: bool, detail: Value| {
        all &= pass;
        checks.push(json!({ "name": name, "pass": pass, "detail": detail }));
    };

    let b = cmd_basis(4, 10)?;
    let ok = b["elements"].as_array().expect("array").iter().all(|e| e["checks"].as_object().expect("object").values().all(|v| v == true));
    record("basis-degree-4", ok, json!({ "kernel_dimension": b["kernel_dimension"] }));

    let a = PairField::solenoidal_mode(4, 1, 1, BoundedValue::ONE)?;
    let t = Rational::new(1, 8);
    let (out, _) = semigroup_apply(&a, exact(&t), 12)?;
    let heat = (-(exact(&t) * BoundedValue::pi().sqr() * BoundedValue::from_i64(2))).exp();
    let (c1, _) = out.coeffs(1, 1);
    let (a1, _) = a.coeffs(1, 1);
    let ok = c1.overlaps(&(a1 * heat));
    record("semigroup-heat-factor", ok, json!({ "coefficient": to_value(&c1)?, "uncertainty": out.uncertainty() }));

    // ℙ of the gradient of cos(πx)cos(2πy)
    let mut g = PairField::zeros(4);
    let pi = BoundedValue::pi();
    g.set(1, 2, -pi, -(pi * BoundedValue::from_i64(2)))?;
    let p = project_with(&VectorFieldName::from_pair(&g)?, 12, ProjectMode::Constructive)?;
    let ok = p.l2_norm().hi() <= 2f64.powi(-12);
    record("projection-kills-gradient", ok, json!({ "norm": to_value(&p.l2_norm())? }));

    let mut datum = PairField::solenoidal_mode(6, 1, 2, BoundedValue::from_rational(&Rational::new(1, 100)))?;
    datum = datum.add(&PairField::solenoidal_mode(6, 2, 1, BoundedValue::from_rational(&Rational::new(-1, 200)))?)?;
    let name = VectorFieldName::from_pair(&datum)?;
    let table = ConstantsTable::default_table();
    let cert = compute_horizon(&name, None, &table)?;
    record("horizon-contraction", cert.epsilon.hi() < 1.0, json!({ "epsilon": to_value(&cert.epsilon)?, "t_a": cert.t_a }));

    let cfg = EngineConfig { cap: 6, degree: 8, panels: 4, max_panels: 64 };
    let s = Solver::new(name, None, &table, cfg)?;
    let t = cert.t_a.clone();
    let sol = s.solve(&t, 8)?;
    record("solve-ledger-closes", sol.ledger.closes(-8), json!({ "iterate": sol.m, "total": sol.ledger.total() }));

    Ok((json!({ "checks": checks }), all))
}

fn dispatch(cfg: &RunConfig) -> Result<(String, Value, bool)> {
    let consts = || constants(cfg.constants.as_deref());
    let (name, body, ok) = match &cfg.command {
        Command::Basis { degree, count } => ("basis", cmd_basis(*degree, *count)?, true),
        Command::Project { input, precision, search_cap } => ("project", cmd_project(&read_input(input)?, *precision, *search_cap)?, true),
        Command::Semigroup { input, t, precision, emit_csv } => {
            ("semigroup", cmd_semigroup(&read_input(input)?, &parse_time(t)?, *precision, emit_csv.as_deref())?, true)
        }
        Command::Fracpower { input, alpha, precision } => {
            ("fracpower", cmd_fracpower(&read_input(input)?, &parse_rational("alpha", alpha)?, *precision)?, true)
        }
        Command::Horizon { input } => ("horizon", cmd_horizon(&read_input(input)?, &consts()?)?, true),
        Command::Solve { input, t, precision, caps, emit_csv } => {
            ("solve", cmd_solve(&read_input(input)?, &consts()?, &parse_time(t)?, *precision, caps, emit_csv.as_deref())?, true)
        }
        Command::Pressure { input, t, x, y, precision, path, caps } => {
            let (x, y) = (parse_rational("x", x)?, parse_rational("y", y)?);
            ("pressure", cmd_pressure(&read_input(input)?, &consts()?, &parse_time(t)?, &x, &y, *precision, *path, caps)?, true)
        }
        Command::Selftest => {
            let (v, ok) = cmd_selftest()?;
            ("selftest", v, ok)
        }
    };
    Ok((name.to_string(), body, ok))
}

fn emit(cfg: &RunConfig, command: &str, body: Value) -> Result<()> {
    let mut doc = json!({ "schema": SCHEMA, "command": command });
    if let (Value::Object(d), Value::Object(b)) = (&mut doc, body) {
        d.extend(b);
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Domain(format!("serialization: {e}")))?;
    text.push('\n');
    match &cfg.output {
        Some(p) => fs::write(p, text).map_err(|e| Error::Domain(format!("{}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Error::Domain(format!("stdout: {e}"))),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        Error::HorizonViolation { .. } => EXIT_HORIZON,
        Error::BudgetNotMet(_) => EXIT_BUDGET,
        _ => EXIT_PRECONDITION,
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let res = dispatch(&cfg).and_then(|(name, body, ok)| emit(&cfg, &name, body).map(|_| ok));
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("solenoid:error:selftest: at least one check failed");
            ExitCode::from(EXIT_SELFTEST)
        }
        Err(e) => {
            eprintln!("solenoid:error:{}: {e}", e.kind());
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_distinct_codes() {
        let codes = [
            exit_code(&Error::Parse("x".into())),
            exit_code(&Error::Precondition("x".into())),
            exit_code(&Error::HorizonViolation { t: "1".into(), horizon: "1/2".into() }),
            exit_code(&Error::BudgetNotMet("x".into())),
        ];
        assert_eq!(codes, [EXIT_PARSE, EXIT_PRECONDITION, EXIT_HORIZON, EXIT_BUDGET]);
        assert_eq!(exit_code(&Error::InsufficientSmoothness("x".into())), EXIT_PRECONDITION);
    }

    #[test]
    fn inputs_need_exactly_one_kind() {
        let two: FieldSpec = serde_json::from_str(r#"{"modes":[],"field":null,"element":null}"#).unwrap();
        assert_eq!(two.kinds(), 1);
        let none = FieldSpec::default();
        assert!(matches!(none.name(Rational::zero()), Err(Error::Parse(_))));
    }

    #[test]
    fn mode_lists_are_exact() {
        let f: FieldSpec = serde_json::from_str(r#"{"modes":[{"n":2,"m":1,"u1":"1/3","u2":"-0.1"}]}"#).unwrap();
        let p = f.pair().unwrap().unwrap();
        assert_eq!(p.cutoff(), 2);
        let (a, b) = p.coeffs(2, 1);
        assert!(a.contains(1.0 / 3.0) && b.contains(-0.1));
        assert!(a.rad() < 1e-15 && b.rad() < 1e-15);
        let neg: FieldSpec = serde_json::from_str(r#"{"modes":[{"n":-1,"m":1,"u1":"1","u2":"0"}]}"#).unwrap();
        assert!(neg.pair().is_err());
    }

    #[test]
    fn times_and_precisions_are_validated() {
        assert!(matches!(parse_time("-1/2"), Err(Error::Precondition(_))));
        assert!(matches!(parse_time("1e"), Err(Error::Parse(_))));
        assert_eq!(parse_time("0.125").unwrap(), Rational::new(1, 8));
        assert!(check_precision(0).is_err() && check_precision(61).is_err() && check_precision(12).is_ok());
    }
}
