//! Instance files, instance generation, the property suite and the `wstar`
//! command line.
//!
//! Exit codes: 0 success, 2 property failure, 3 input error, 4 convergence
//! error, 5 usage error, 6 unresolved name, 7 precondition failure.

pub mod demo;
pub mod generate;
pub mod instance;
pub mod report;
pub mod suite;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use self::demo::Example;
use self::generate::{generate_instance, Profile};
use self::instance::{emit_instance, parse_instance, validate_instance, Instance, InstanceError};
use self::report::{function_json, function_table, hc0_json, k0_json, Report};
use self::suite::{run_suite, SuiteOptions};
use crate::algebra::fmt_complex;
use crate::complex::{chern_check_of, fredholm_f, hodge_spaces, lefschetz, ChernWeighting, ComplexEndomorphism, FiniteComplex};
use crate::error::Error;
use crate::operator::{fredholm_index, ModuleMap};
use crate::oracle;
use crate::spectral::{cyclic_trace_of, phase, spectral_function_of, spectral_measure};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_CONVERGENCE: i32 = 4;
pub const EXIT_USAGE: i32 = 5;
pub const EXIT_UNRESOLVED: i32 = 6;
pub const EXIT_PRECONDITION: i32 = 7;

#[derive(Debug, Parser)]
#[command(name = "wstar", version, about = "Hilbert W*-modules over finite-dimensional algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Instance file (TOML); without it the instance is generated from --seed/--profile.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "small")]
    pub profile: Profile,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Also write the report as JSON.
    #[arg(long)]
    pub json_out: Option<PathBuf>,
    /// Omit the timestamp header.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Run the full property suite.
    Check {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
        /// Worker threads; the report does not depend on this.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Integrate L1 without the e^(iφ) weight.
        #[arg(long)]
        unweighted: bool,
    },
    /// Spectral measure, spectral function and cyclic trace of a unitary.
    Spectrum {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        map: Option<String>,
    },
    /// Harmonic space classes per degree.
    Hodge {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        complex: Option<String>,
    },
    /// Fredholm index of d + d*.
    Index {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        complex: Option<String>,
    },
    /// L1 table, L0 vector, Chern check and oracle bridge.
    Lefschetz {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
        #[arg(long)]
        complex: Option<String>,
        #[arg(long)]
        endo: Option<String>,
        #[arg(long)]
        unweighted: bool,
    },
    /// Finite models of the infinite-dimensional examples.
    Demo {
        #[arg(value_enum)]
        example: Example,
        #[command(flatten)]
        output: Output,
    },
    /// Write a generated instance file.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "small")]
        profile: Profile,
        /// Destination; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a command printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn fail(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Outcome { code, stdout: String::new(), stderr }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Convergence { .. } => EXIT_CONVERGENCE,
        Error::Consistency(_) => EXIT_PROPERTY,
        _ => EXIT_PRECONDITION,
    }
}

/// Parses `args` (without the program name) and runs the command.
pub fn run_command<S: AsRef<str>>(args: &[S]) -> Outcome {
    let argv = std::iter::once("wstar").chain(args.iter().map(AsRef::as_ref));
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(cli),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome::fail(EXIT_USAGE, text),
            }
        }
    }
}

fn load(source: &Source) -> Result<(Instance, String), Outcome> {
    match &source.instance {
        Some(path) => parse_instance(path)
            .map(|i| (i, path.display().to_string()))
            .map_err(|e| Outcome::fail(EXIT_INPUT, e.to_string())),
        None => validate_instance(generate_instance(source.seed, source.profile))
            .map(|i| (i, format!("seed {} ({})", source.seed, source.profile)))
            .map_err(|e| Outcome::fail(EXIT_INPUT, e.to_string())),
    }
}

fn timestamp(output: &Output) -> Option<u64> {
    (!output.no_timestamp).then(|| SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()))
}

fn finish(report: &Report, output: &Output, code: i32) -> Outcome {
    let ts = timestamp(output);
    if let Some(path) = &output.json_out {
        if let Err(e) = write_file(path, &report.json(ts)) {
            return Outcome::fail(EXIT_INPUT, e);
        }
    }
    Outcome { code, stdout: report.text(ts), stderr: String::new() }
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn run(cli: Cli) -> Outcome {
    let result = match cli.verb {
        Verb::Check { source, output, parallel, unweighted } => check(&source, &output, parallel, weighting(unweighted)),
        Verb::Spectrum { source, output, map } => spectrum(&source, &output, map.as_deref()),
        Verb::Hodge { source, output, complex } => hodge(&source, &output, complex.as_deref()),
        Verb::Index { source, output, complex } => index(&source, &output, complex.as_deref()),
        Verb::Lefschetz { source, output, complex, endo, unweighted } => {
            lefschetz_verb(&source, &output, complex.as_deref(), endo.as_deref(), weighting(unweighted))
        }
        Verb::Demo { example, output } => {
            let (report, pass) = demo::run_example(example);
            Ok(finish(&report, &output, if pass { EXIT_OK } else { EXIT_PROPERTY }))
        }
        Verb::Gen { seed, profile, out } => {
            let text = emit_instance(&generate_instance(seed, profile));
            match out {
                Some(path) => write_file(&path, &text)
                    .map(|_| Outcome { code: EXIT_OK, stdout: String::new(), stderr: String::new() })
                    .map_err(|e| Outcome::fail(EXIT_INPUT, e)),
                None => Ok(Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }),
            }
        }
    };
    result.unwrap_or_else(|o| o)
}

fn weighting(unweighted: bool) -> ChernWeighting {
    if unweighted {
        ChernWeighting::Unweighted
    } else {
        ChernWeighting::Weighted
    }
}

fn lib_error(e: Error) -> Outcome {
    Outcome::fail(exit_code(&e), e.to_string())
}

fn check(source: &Source, output: &Output, parallel: usize, weighting: ChernWeighting) -> Result<Outcome, Outcome> {
    let (inst, label) = load(source)?;
    let options = SuiteOptions { seed: source.seed, profile: source.profile, weighting, parallel };
    let props = run_suite(&inst, &options);
    let failed = props.iter().filter(|p| !p.pass).count();
    let mut r = Report::new("check");
    r.line(format!("instance: {label}"));
    r.line(format!("algebra: {}", inst.algebra));
    let width = props.iter().map(|p| p.name.chars().count()).max().unwrap_or(0);
    for p in &props {
        let pad = width - p.name.chars().count();
        r.line(format!("{}  {}{}  {}", if p.pass { "PASS" } else { "FAIL" }, p.name, " ".repeat(pad), p.detail));
    }
    r.line(format!("{} properties, {} passed, {} failed", props.len(), props.len() - failed, failed));
    r.set("instance", json!(label))
        .set("properties", json!(props))
        .set("passed", json!(props.len() - failed))
        .set("failed", json!(failed));
    Ok(finish(&r, output, if failed == 0 { EXIT_OK } else { EXIT_PROPERTY }))
}

fn find_map<'a>(inst: &'a Instance, name: Option<&str>) -> Result<(String, &'a ModuleMap), Outcome> {
    match name {
        Some(n) => inst
            .maps
            .get(n)
            .map(|m| (n.to_string(), m))
            .ok_or_else(|| Outcome::fail(EXIT_UNRESOLVED, format!("no map named {n:?}"))),
        None => {
            let preferred = inst.maps.get("u").filter(|m| m.is_endomorphism() && m.is_unitary()).map(|m| ("u".to_string(), m));
            preferred
                .or_else(|| {
                    inst.maps.iter().find(|(_, m)| m.is_endomorphism() && m.is_unitary()).map(|(n, m)| (n.clone(), m))
                })
                .ok_or_else(|| Outcome::fail(EXIT_UNRESOLVED, "the instance has no unitary endomorphism"))
        }
    }
}

fn find_complex<'a>(inst: &'a Instance, name: Option<&str>) -> Result<(String, &'a FiniteComplex), Outcome> {
    let name = match name {
        Some(n) => n.to_string(),
        None if inst.complexes.contains_key("c") => "c".to_string(),
        None => inst
            .complexes
            .keys()
            .next()
            .cloned()
            .ok_or_else(|| Outcome::fail(EXIT_UNRESOLVED, "the instance has no complex"))?,
    };
    inst.complexes
        .get(&name)
        .map(|c| (name.clone(), c))
        .ok_or_else(|| Outcome::fail(EXIT_UNRESOLVED, format!("no complex named {name:?}")))
}

fn spectrum(source: &Source, output: &Output, map: Option<&str>) -> Result<Outcome, Outcome> {
    let (inst, label) = load(source)?;
    let (name, u) = find_map(&inst, map)?;
    let measure = spectral_measure(u).map_err(lib_error)?;
    let function = spectral_function_of(&measure).map_err(lib_error)?;
    let trace = cyclic_trace_of(&measure);
    let mut r = Report::new("spectrum");
    r.line(format!("instance: {label}"));
    r.line(format!("map: {name} on a module of class {}", u.source().k0()));
    r.line("spectral measure:");
    let mut points = Vec::new();
    for p in measure.points() {
        let class = crate::algebra::k0_of_projection(p.projection.matrix()).map_err(lib_error)?;
        r.line(format!("  φ = {:.9}  e^(iφ) = {}  class {class}", p.angle, fmt_complex(phase(p.angle))));
        points.push(json!({ "angle": p.angle, "class": class.ranks }));
    }
    r.line("spectral function:");
    for l in function_table(&function) {
        r.line(l);
    }
    r.line(format!("cyclic trace: {trace}"));
    r.line(format!("reconstruction residual: {:.3e}", measure.reconstruction_residual(u)));
    for w in measure.warnings() {
        r.line(format!("warning: {w}"));
    }
    r.set("instance", json!(label))
        .set("map", json!(name))
        .set("points", json!(points))
        .set("spectral_function", function_json(&function))
        .set("cyclic_trace", hc0_json(&trace))
        .set("warnings", json!(measure.warnings()));
    Ok(finish(&r, output, EXIT_OK))
}

fn hodge(source: &Source, output: &Output, complex: Option<&str>) -> Result<Outcome, Outcome> {
    let (inst, label) = load(source)?;
    let (name, c) = find_complex(&inst, complex)?;
    let h = hodge_spaces(c).map_err(lib_error)?;
    let betti = oracle::oracle_betti(c);
    let mut r = Report::new("hodge");
    r.line(format!("instance: {label}"));
    r.line(format!("complex: {name} ({} degrees)", c.len()));
    r.line("  m   class of E_m   class of H_m   dim_C H_m   oracle dim");
    let mut degrees = Vec::new();
    let mut agree = true;
    for (m, s) in h.h().iter().enumerate() {
        let k = s.k0();
        let dim = k.complex_dim(c.algebra());
        agree &= dim == betti[m] as i64;
        r.line(format!("  {m}   {}   {k}   {dim}   {}", c.spaces()[m].k0(), betti[m]));
        degrees.push(json!({ "degree": m, "space": k0_json(&c.spaces()[m].k0()), "harmonic": k0_json(&k), "dim": dim, "oracle_dim": betti[m] }));
    }
    r.line(format!("oracle agreement: {}", if agree { "PASS" } else { "FAIL" }));
    r.set("instance", json!(label)).set("complex", json!(name)).set("degrees", json!(degrees)).set("oracle_agree", json!(agree));
    Ok(finish(&r, output, if agree { EXIT_OK } else { EXIT_PROPERTY }))
}

fn index(source: &Source, output: &Output, complex: Option<&str>) -> Result<Outcome, Outcome> {
    let (inst, label) = load(source)?;
    let (name, c) = find_complex(&inst, complex)?;
    let f = fredholm_f(c).map_err(lib_error)?;
    let ind = fredholm_index(&f);
    let euler = c.euler_characteristic();
    let harmonic = hodge_spaces(c).map_err(lib_error)?.euler_class();
    let agree = ind == euler && ind == harmonic;
    let mut r = Report::new("index");
    r.line(format!("instance: {label}"));
    r.line(format!("complex: {name}"));
    r.line(format!("index of d + d*: {ind}"));
    r.line(format!("Euler characteristic: {euler}"));
    r.line(format!("[H_ev] - [H_od]: {harmonic}"));
    r.line(format!("agreement: {}", if agree { "PASS" } else { "FAIL" }));
    r.set("instance", json!(label))
        .set("complex", json!(name))
        .set("index", k0_json(&ind))
        .set("euler_characteristic", k0_json(&euler))
        .set("harmonic_euler", k0_json(&harmonic))
        .set("agree", json!(agree));
    Ok(finish(&r, output, if agree { EXIT_OK } else { EXIT_PROPERTY }))
}

fn lefschetz_verb(
    source: &Source,
    output: &Output,
    complex: Option<&str>,
    endo: Option<&str>,
    weighting: ChernWeighting,
) -> Result<Outcome, Outcome> {
    let (inst, label) = load(source)?;
    let (cname, c, ename, u) = match endo {
        Some(e) => {
            let (cn, u) = inst
                .endomorphisms
                .get(e)
                .ok_or_else(|| Outcome::fail(EXIT_UNRESOLVED, format!("no endomorphism named {e:?}")))?;
            if complex.is_some_and(|n| n != cn) {
                return Err(Outcome::fail(EXIT_UNRESOLVED, format!("endomorphism {e:?} belongs to complex {cn:?}")));
            }
            (cn.clone(), &inst.complexes[cn], e.to_string(), u.clone())
        }
        None => {
            let (cn, c) = find_complex(&inst, complex)?;
            match inst.endomorphisms.iter().find(|(_, (owner, _))| *owner == cn) {
                Some((en, (_, u))) => (cn, c, en.clone(), u.clone()),
                None => (cn, c, "identity".to_string(), ComplexEndomorphism::identity(c)),
            }
        }
    };
    let data = lefschetz(c, &u).map_err(lib_error)?;
    let chern = chern_check_of(&data, weighting);
    let flat = oracle::oracle_lefschetz(c, &u);
    let weighted: C64 = data.l0.traces.iter().zip(c.algebra().block_sizes()).map(|(t, &n)| t * n as f64).sum();
    let bridge = (flat - weighted).norm();
    let bridge_ok = bridge <= crate::tol::tolerances().residual();
    let mut r = Report::new("lefschetz");
    r.line(format!("instance: {label}"));
    r.line(format!("complex: {cname}, endomorphism: {ename}"));
    r.line("L1:");
    for l in function_table(&data.l1) {
        r.line(l);
    }
    r.line(format!("L0: {}", data.l0));
    r.line(format!(
        "Chern check ({}): {} vs {}: {}",
        match weighting {
            ChernWeighting::Weighted => "weighted",
            ChernWeighting::Unweighted => "unweighted",
        },
        chern.lhs,
        chern.rhs,
        if chern.equal { "PASS" } else { "FAIL" }
    ));
    r.line(format!(
        "oracle bridge: flat Lefschetz number {} vs Σ n_j L0_j {}: {}",
        fmt_complex(flat),
        fmt_complex(weighted),
        if bridge_ok { "PASS" } else { "FAIL" }
    ));
    r.set("instance", json!(label))
        .set("complex", json!(cname))
        .set("endomorphism", json!(ename))
        .set("l1", function_json(&data.l1))
        .set("l0", hc0_json(&data.l0))
        .set("chern", json!({ "lhs": hc0_json(&chern.lhs), "rhs": hc0_json(&chern.rhs), "equal": chern.equal }))
        .set("oracle_bridge", json!({ "flat": report::complex_json(flat), "weighted_l0": report::complex_json(weighted), "pass": bridge_ok }));
    Ok(finish(&r, output, if chern.equal && bridge_ok { EXIT_OK } else { EXIT_PROPERTY }))
}

impl From<InstanceError> for Outcome {
    fn from(e: InstanceError) -> Self {
        Outcome::fail(EXIT_INPUT, e.to_string())
    }
}
