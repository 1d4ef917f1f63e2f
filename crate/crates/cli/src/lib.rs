//! Front end for `bit-core`: reads JSON documents, runs one job and emits a
//! deterministic JSON report.

pub mod schema;

use std::collections::BTreeMap;
use std::path::PathBuf;

use bit_core::cap::{cap_kernel_cokernel, cap_kernel_cokernel_slow, CapSpec, Polarity};
use bit_core::hamiltonian::{aniso, find_brake_orbit, harmonic, linearized_path, HamiltonianSystem, Polynomial, Term};
use bit_core::index::{brake_report, graph_index, nullities};
use bit_core::linalg::{Mat, Vector};
use bit_core::moduli::{classify_good_bad, virtual_dimension, ModuliSpec};
use bit_core::operator::{spectral_flow, Domain, OperatorFamily};
use bit_core::symplectic::{rotation_path, SymplecticPath};
use bit_core::{selfcheck, Config, Error, HalfInt};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use schema::{validate, validate_as, Schema, Violation};

pub const TOOL: &str = "bit";
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "bit", version, about = "Maslov-type indices, spectral flow and moduli dimensions for brake-symmetric problems")]
pub struct Cli {
    /// Flat JSON object of dotted config keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// μ_CZ, μ1, μ2 and nullities of a symplectic path document.
    Index {
        input: PathBuf,
    },
    /// Spectral flow of a family of asymptotic operators.
    SpectralFlow {
        input: PathBuf,
    },
    /// Virtual dimension of a moduli spec, by both assembly routes.
    Vdim {
        input: PathBuf,
    },
    /// Shoots for a brake orbit and reports its linearized indices.
    BrakeOrbit {
        input: PathBuf,
    },
    /// Kernel and cokernel of the model cap operator.
    CapOracle {
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, default_value_t = 1)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = Sign::Positive)]
        sign: Sign,
        /// Also count by finite differences (ω = ±π only).
        #[arg(long)]
        slow_oracle: bool,
    },
    /// Good/bad classification of the iterates of a path.
    Classify {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_m: usize,
        /// Dimension parameter of the grading; path size + 1 by default.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Runs the built-in invariant suite.
    Selfcheck,
    /// Checks a document without running anything.
    Validate {
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Index { .. } => "index",
            Command::SpectralFlow { .. } => "spectral-flow",
            Command::Vdim { .. } => "vdim",
            Command::BrakeOrbit { .. } => "brake-orbit",
            Command::CapOracle { .. } => "cap-oracle",
            Command::Classify { .. } => "classify",
            Command::Selfcheck => "selfcheck",
            Command::Validate { .. } => "validate",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ValidationError,
    NumericalError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::ValidationError => 2,
            Status::NumericalError => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorDoc {
    pub name: String,
    pub module: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    pub input_hash: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorDoc>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Outcome of a job before it is wrapped into a [`Report`].
enum Outcome {
    Done(Value),
    Invalid(Vec<Violation>),
    Failed(ErrorDoc, Option<Value>),
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) => Outcome::Invalid(vec![Violation { path: "$".into(), message: msg }]),
            e => Outcome::Failed(ErrorDoc { name: e.name().into(), module: e.module().into(), message: e.to_string() }, None),
        }
    }
}

fn env_key(key: &str) -> String {
    format!("BIT_{}", key.replace('.', "_").to_uppercase())
}

/// Defaults, then the config file, then `BIT_*` variables.
pub fn resolve_config(file: Option<&Value>, env: &dyn Fn(&str) -> Option<String>) -> Result<Config, Vec<Violation>> {
    let mut cfg = Config::default();
    let mut bad = Vec::new();
    if let Some(doc) = file {
        match doc.as_object() {
            None => bad.push(Violation { path: "config".into(), message: "expected a flat object of dotted keys".into() }),
            Some(obj) => {
                for (k, v) in obj {
                    let path = format!("config.{k}");
                    match v.as_f64() {
                        None => bad.push(Violation { path, message: "expected a number".into() }),
                        Some(x) => {
                            if let Err(message) = cfg.set(k, x) {
                                bad.push(Violation { path, message });
                            }
                        }
                    }
                }
            }
        }
    }
    for key in Config::KEYS {
        let var = env_key(key);
        let Some(raw) = env(&var) else { continue };
        match raw.trim().parse::<f64>() {
            Ok(x) => {
                if let Err(message) = cfg.set(key, x) {
                    bad.push(Violation { path: var, message });
                }
            }
            Err(_) => bad.push(Violation { path: var, message: format!("not a number: '{raw}'") }),
        }
    }
    if bad.is_empty() {
        Ok(cfg)
    } else {
        Err(bad)
    }
}

/// The config as dotted keys; counts stay integers.
pub fn config_snapshot(cfg: &Config) -> BTreeMap<String, Value> {
    Config::KEYS
        .iter()
        .map(|k| {
            let v = cfg.get(k).expect("listed key");
            let v = if k.starts_with("tol.") { json!(v) } else { json!(v as u64) };
            (k.to_string(), v)
        })
        .collect()
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_json(path: &PathBuf) -> Result<Value, Vec<Violation>> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map(|_| s)
    } else {
        std::fs::read_to_string(path)
    };
    let text = text.map_err(|e| vec![Violation { path: "$".into(), message: format!("cannot read {}: {e}", path.display()) }])?;
    serde_json::from_str(&text).map_err(|e| vec![Violation { path: "$".into(), message: format!("invalid JSON: {e}") }])
}

/// Runs one job. `env` looks up environment variables.
pub fn execute(cli: &Cli, env: &dyn Fn(&str) -> Option<String>) -> Report {
    let command = cli.command.name();
    let mut report = Report {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema_version: SCHEMA_VERSION,
        command: command.into(),
        config: BTreeMap::new(),
        input_hash: String::new(),
        status: Status::Ok,
        result: None,
        violations: Vec::new(),
        error: None,
    };

    let (input, options) = match job_input(&cli.command) {
        Ok(x) => x,
        Err(v) => return invalid(report, v),
    };
    let canonical = json!({ "command": command, "input": input, "options": options });
    report.input_hash = sha256_hex(canonical.to_string().as_bytes());

    let file = match &cli.config {
        Some(p) => match read_json(p) {
            Ok(v) => Some(v),
            Err(v) => return invalid(report, v.into_iter().map(|x| Violation { path: "config".into(), ..x }).collect()),
        },
        None => None,
    };
    let cfg = match resolve_config(file.as_ref(), env) {
        Ok(c) => c,
        Err(v) => return invalid(report, v),
    };
    report.config = config_snapshot(&cfg);

    match dispatch(&cli.command, &input, &cfg) {
        Outcome::Done(v) => report.result = Some(v),
        Outcome::Invalid(v) => return invalid(report, v),
        Outcome::Failed(e, partial) => {
            report.status = Status::NumericalError;
            report.result = partial;
            report.error = Some(e);
        }
    }
    report
}

fn invalid(mut report: Report, violations: Vec<Violation>) -> Report {
    report.status = Status::ValidationError;
    report.violations = violations;
    report
}

/// The input document and the options that shape the job.
fn job_input(command: &Command) -> Result<(Value, Value), Vec<Violation>> {
    Ok(match command {
        Command::Index { input }
        | Command::SpectralFlow { input }
        | Command::Vdim { input }
        | Command::BrakeOrbit { input }
        | Command::Validate { input } => (read_json(input)?, Value::Null),
        Command::Classify { input, max_m, n } => (read_json(input)?, json!({ "max_m": max_m, "n": n })),
        Command::CapOracle { omega, rank, sign, slow_oracle } => {
            (json!({ "omega": omega, "rank": rank, "sign": sign, "slow_oracle": slow_oracle }), Value::Null)
        }
        Command::Selfcheck => (Value::Null, Value::Null),
    })
}

fn checked(schema: Schema, doc: &Value) -> Result<(), Outcome> {
    let v = validate_as(schema, doc);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Outcome::Invalid(v))
    }
}

fn dispatch(command: &Command, input: &Value, cfg: &Config) -> Outcome {
    let run = || -> Result<Value, Outcome> {
        match command {
            Command::Index { .. } => {
                checked(Schema::Path, input)?;
                index_job(&path_from(input, cfg)?, cfg)
            }
            Command::SpectralFlow { .. } => {
                checked(Schema::Family, input)?;
                flow_job(input, cfg)
            }
            Command::Vdim { .. } => {
                checked(Schema::Moduli, input)?;
                let spec: ModuliSpec = serde_json::from_value(input.clone()).map_err(|e| Error::InvalidInput(e.to_string()))?;
                let r = virtual_dimension(&spec)?;
                Ok(json!({
                    "virtual_dim": r.virtual_dim.to_string(),
                    "report": r,
                    "routes": {
                        "fredholm_plus_teichmuller_minus_aut": r.virtual_dim,
                        "closed_formula": r.closed_formula,
                        "agree": r.virtual_dim == r.closed_formula,
                    },
                }))
            }
            Command::BrakeOrbit { .. } => {
                checked(Schema::BrakeJob, input)?;
                brake_job(input, cfg)
            }
            Command::CapOracle { omega, rank, sign, slow_oracle } => cap_job(*omega, *rank, *sign, *slow_oracle),
            Command::Classify { max_m, n, .. } => {
                checked(Schema::Path, input)?;
                let path = path_from(input, cfg)?;
                let n = n.unwrap_or(path.n() + 1);
                let rows = classify_good_bad(&path, n, *max_m, cfg)?;
                Ok(json!({ "n": n, "rows": rows }))
            }
            Command::Selfcheck => {
                let results = selfcheck::run(cfg);
                let failed = results.iter().filter(|r| !r.passed).count();
                let doc = json!({ "passed": results.len() - failed, "failed": failed, "checks": results });
                if failed > 0 {
                    let e = ErrorDoc {
                        name: "SelfcheckFailed".into(),
                        module: "cli".into(),
                        message: format!("{failed} of {} checks failed", results.len()),
                    };
                    return Err(Outcome::Failed(e, Some(doc)));
                }
                Ok(doc)
            }
            Command::Validate { .. } => {
                let v = validate(input);
                if v.is_empty() {
                    Ok(json!({ "valid": true }))
                } else {
                    Err(Outcome::Invalid(v))
                }
            }
        }
    };
    match run() {
        Ok(v) => Outcome::Done(v),
        Err(o) => o,
    }
}

impl From<serde_json::Error> for Outcome {
    fn from(e: serde_json::Error) -> Self {
        Outcome::Invalid(vec![Violation { path: "$".into(), message: e.to_string() }])
    }
}

fn path_from(doc: &Value, cfg: &Config) -> Result<SymplecticPath<f64>, Outcome> {
    if doc.get("kind").is_some() {
        let omega = doc["omega"].as_f64().unwrap_or_default();
        let n = doc["n"].as_u64().unwrap_or(1) as usize;
        let a = doc["interval"][0].as_f64().unwrap_or_default();
        let b = doc["interval"][1].as_f64().unwrap_or(1.0);
        let samples = doc["samples"].as_u64().unwrap_or(2) as usize;
        return Ok(rotation_path(omega, n, (a, b), samples)?);
    }
    let times: Vec<f64> = serde_json::from_value(doc["times"].clone())?;
    let rows: Vec<Vec<Vec<f64>>> = serde_json::from_value(doc["matrices"].clone())?;
    let mats = rows
        .iter()
        .map(|m| {
            let d = m.len();
            Mat::from_row_iterator(d, d, m.iter().flatten().copied())
        })
        .collect();
    Ok(SymplecticPath::from_samples(times, mats, cfg.tol_symplectic)?)
}

fn index_job(path: &SymplecticPath<f64>, cfg: &Config) -> Result<Value, Outcome> {
    let cz = graph_index(path, cfg)?;
    let mu1 = brake_report(path, 1, cfg)?;
    let mu2 = brake_report(path, 2, cfg)?;
    let nu = nullities(path, cfg);
    Ok(json!({
        "summary": { "mu_cz": cz.value.to_string(), "mu1": mu1.value.to_string(), "mu2": mu2.value.to_string() },
        "mu_cz": cz,
        "mu1": mu1,
        "mu2": mu2,
        "nullities": nu,
    }))
}

fn flow_job(doc: &Value, cfg: &Config) -> Result<Value, Outcome> {
    let n = doc["n"].as_u64().unwrap_or(1) as usize;
    let period = doc["period"].as_f64().unwrap_or(1.0);
    let domain = if doc["domain"] == "full" { Domain::Full } else { Domain::BrakeSymmetric };
    let from = doc["from"].as_f64().unwrap_or_default();
    let to = doc["to"].as_f64().unwrap_or_default();
    let points = doc.get("points").and_then(Value::as_u64).map_or(cfg.family_grid, |p| p as usize);
    let family = OperatorFamily::interpolating_multiples(n, period, domain, from, to, points)?;
    let report = spectral_flow(&family, cfg.fourier_k, cfg)?;
    // the endpoint loops are constant, so their paths are rotations
    let index_of = |c: f64| -> Result<HalfInt, Error> {
        let p = rotation_path(c, n, (0.0, period), 1025)?;
        match domain {
            Domain::Full => Ok(graph_index(&p, cfg)?.value),
            Domain::BrakeSymmetric => Ok(brake_report(&p, 1, cfg)?.value),
        }
    };
    let diff = index_of(to)? - index_of(from)?;
    Ok(json!({
        "spectral_flow": report.value,
        "report": report,
        "endpoint_index_difference": diff,
        "agree": HalfInt::from_int(report.value) == diff,
    }))
}

#[derive(Deserialize)]
struct SystemDoc {
    name: Option<String>,
    n: Option<usize>,
    weights: Option<Vec<f64>>,
    terms: Option<Vec<Term<f64>>>,
}

fn system_from(doc: &Value) -> Result<Box<dyn HamiltonianSystem<f64>>, Outcome> {
    let s: SystemDoc = serde_json::from_value(doc.clone())?;
    Ok(match s.name.as_deref() {
        Some("harmonic") => Box::new(harmonic::<f64>(s.n.unwrap_or(1))),
        Some("aniso") => Box::new(aniso::<f64>(s.weights.unwrap_or_default())),
        _ => Box::new(Polynomial::new(s.n.unwrap_or(0), s.terms.unwrap_or_default())?),
    })
}

fn brake_job(doc: &Value, cfg: &Config) -> Result<Value, Outcome> {
    let system = system_from(&doc["system"])?;
    let guess: Vec<f64> = serde_json::from_value(doc["guess"].clone())?;
    let h = doc["energy"].as_f64().unwrap_or_default();
    let tau = doc["tau_guess"].as_f64().unwrap_or(1.0);
    let found = find_brake_orbit(system.as_ref(), &Vector::from_vec(guess), h, tau, cfg)?;
    let gamma = linearized_path(system.as_ref(), &found.orbit, cfg)?;
    let nu = nullities(&gamma, &Config { tol_rank: cfg.tol_rank.max(1e-6), ..cfg.clone() });
    let degenerate = nu.nu + nu.nu1 + nu.nu2 > 0;
    let index = |r: Result<bit_core::index::IndexReport, Error>| match r {
        Ok(r) => json!({ "value": r.value, "display": r.value.to_string() }),
        Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
    };
    Ok(json!({
        "period": found.period,
        "iterations": found.iterations,
        "shooting_residual": found.residual,
        "brake_residual": found.orbit.brake_residual(),
        "energy_drift": found.orbit.energy_drift,
        "start": found.orbit.start().as_slice(),
        "nullities": nu,
        "degenerate": degenerate,
        "mu1": index(brake_report(&gamma, 1, cfg)),
        "mu_cz": index(graph_index(&gamma, cfg)),
    }))
}

fn cap_job(omega: f64, rank: usize, sign: Sign, slow: bool) -> Result<Value, Outcome> {
    let polarity = match sign {
        Sign::Positive => Polarity::Positive,
        Sign::Negative => Polarity::Negative,
    };
    let spec = CapSpec::new(polarity, omega, rank)?;
    let (ker, coker) = cap_kernel_cokernel(&spec)?;
    let mut doc = json!({
        "ker": ker,
        "coker": coker,
        "index": ker as i64 - coker as i64,
    });
    if slow {
        let (sk, sc) = cap_kernel_cokernel_slow(&spec, 12, 2048)?;
        doc["slow_oracle"] = json!({ "ker": sk, "coker": sc, "agree": (sk, sc) == (ker, coker) });
    }
    Ok(doc)
}
