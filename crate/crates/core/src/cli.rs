//! `qms` command-line front end.
//!
//! Exit codes: 0 all checks passed, 1 a bound or invariant was violated,
//! 2 usage or input error, 3 numeric failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::channel::{
    self, ChannelSpec, DensityMatrix, GeneratorMap, SuperOperator, DEFAULT_POSITIVITY_SAMPLES,
};
use crate::contraction::{self, DEFAULT_RESTARTS};
use crate::ensembles::{self, EnsembleConfig, EnsembleMode};
use crate::error::{QmsError, Result};
use crate::finite_time::{
    self, ConvergencePair, PairRequest, ValidationOptions, DEFAULT_CONTINUOUS_STEP,
};
use crate::report::{self, format_sig, BoundReport, Regime};
use crate::spectral;
use crate::stability::{self, AnalysisOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

const DEFAULT_TOL: f64 = 1e-6;
const TEXT_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Discrete,
    Continuous,
}

#[derive(Debug, Parser)]
#[command(
    name = "qms",
    version,
    about = "Perturbation bounds for quantum Markov processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Slack tolerance for bound checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Trajectory length (discrete) or number of time samples (continuous).
    #[arg(long, global = true)]
    pub steps: Option<u64>,
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<f64>,
    /// auto-chi2 | auto-db | auto-eq10:MU | K:RATE
    #[arg(long, global = true)]
    pub pair: Option<String>,
    /// maximally-mixed | basis:I | file:PATH (give twice for ρ₀ and σ₀)
    #[arg(long, global = true)]
    pub state: Vec<String>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that each input is a CPTP map (generators via their time-1 map).
    Validate { inputs: Vec<PathBuf> },
    /// Spectrum, fixed points, contraction and condition numbers.
    Analyze { input: PathBuf },
    /// Stationary-state displacement bound for T1 versus T2.
    Compare { t1: PathBuf, t2: PathBuf },
    /// Simulated distances against the finite-time bound.
    Trajectory { t: PathBuf, e: PathBuf },
    /// Convergence pairs from every available recipe.
    Pairs { input: PathBuf },
    /// Random sweep of perturbation checks.
    Ensemble {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long = "kraus-rank")]
        kraus_rank: Option<usize>,
        #[arg(long, value_enum, default_value = "discrete")]
        mode: ModeArg,
    },
}

/// Parsed `--pair` value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairArg {
    Chi2,
    DetailedBalance,
    MinimalPolynomial(f64),
    Fixed { k: f64, rate: f64 },
}

impl PairArg {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |d: &str| QmsError::Parse {
            location: "--pair".into(),
            detail: format!("`{s}`: {d}"),
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad("expected a number"))
        };
        match s {
            "auto-chi2" => Ok(PairArg::Chi2),
            "auto-db" => Ok(PairArg::DetailedBalance),
            _ => {
                if let Some(mu) = s.strip_prefix("auto-eq10:") {
                    Ok(PairArg::MinimalPolynomial(num(mu)?))
                } else if let Some((k, r)) = s.split_once(':') {
                    Ok(PairArg::Fixed {
                        k: num(k)?,
                        rate: num(r)?,
                    })
                } else {
                    Err(bad("expected auto-chi2, auto-db, auto-eq10:MU or K:RATE"))
                }
            }
        }
    }

    fn request(self) -> PairRequest {
        match self {
            PairArg::Chi2 => PairRequest::Chi2,
            PairArg::DetailedBalance => PairRequest::DetailedBalance,
            PairArg::MinimalPolynomial(mu) => PairRequest::MinimalPolynomial { mu },
            PairArg::Fixed { k, rate } => PairRequest::UserSupplied { k, rate },
        }
    }
}

pub fn parse_state(arg: &str, d: usize) -> Result<DensityMatrix> {
    let state = if arg == "maximally-mixed" {
        DensityMatrix::maximally_mixed(d)
    } else if let Some(i) = arg.strip_prefix("basis:") {
        let i: usize = i.parse().map_err(|_| QmsError::Parse {
            location: "--state".into(),
            detail: format!("`{arg}`: expected basis:INDEX"),
        })?;
        if i >= d {
            return Err(QmsError::Dimension(format!(
                "--state {arg}: index out of range for d = {d}"
            )));
        }
        DensityMatrix::basis(d, i)
    } else if let Some(path) = arg.strip_prefix("file:") {
        channel::parse_state_file(Path::new(path))?
    } else {
        return Err(QmsError::Parse {
            location: "--state".into(),
            detail: format!("`{arg}`: expected maximally-mixed, basis:I or file:PATH"),
        });
    };
    if state.dim() != d {
        return Err(QmsError::Dimension(format!(
            "--state {arg} has dimension {}, the maps act on d = {d}",
            state.dim()
        )));
    }
    Ok(state)
}

/// A finished command: the JSON document, the rows it carries, and whether
/// every check passed.
struct Outcome {
    doc: Value,
    rows: Option<Vec<BoundReport>>,
    ok: bool,
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn exit_code(e: &QmsError) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(outcome) => match emit(&cli, &outcome, stdout) {
            Ok(()) => {
                if outcome.ok {
                    EXIT_OK
                } else {
                    EXIT_VIOLATION
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                exit_code(&e)
            }
        },
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    if cli.format == Format::Csv
        && !matches!(
            cli.command,
            Command::Compare { .. } | Command::Trajectory { .. } | Command::Ensemble { .. }
        )
    {
        return Err(QmsError::Parse {
            location: "--format".into(),
            detail: "csv output is available for compare, trajectory and ensemble".into(),
        });
    }
    if cli.state.len() > 2 {
        return Err(QmsError::Parse {
            location: "--state".into(),
            detail: "given more than twice".into(),
        });
    }
    if let Some(p) = &cli.pair {
        PairArg::parse(p)?;
    }
    match &cli.command {
        Command::Validate { inputs } => validate(cli, inputs),
        Command::Analyze { input } => analyze(cli, input),
        Command::Compare { t1, t2 } => compare(cli, t1, t2),
        Command::Trajectory { t, e } => trajectory(cli, t, e),
        Command::Pairs { input } => pairs(cli, input),
        Command::Ensemble {
            dim,
            count,
            eps,
            kraus_rank,
            mode,
        } => ensemble(cli, *dim, *count, *eps, *kraus_rank, *mode),
    }
}

fn tol(cli: &Cli) -> f64 {
    cli.tol.unwrap_or(DEFAULT_TOL)
}

fn analysis_opts(cli: &Cli) -> AnalysisOptions {
    AnalysisOptions {
        restarts: cli.restarts,
        seed: cli.seed,
    }
}

fn validation_opts(cli: &Cli) -> ValidationOptions {
    ValidationOptions {
        restarts: cli.restarts,
        seed: cli.seed,
    }
}

fn load(path: &Path) -> Result<ChannelSpec> {
    channel::parse_channel_file(path)
}

/// The map whose fixed points are analyzed: the channel itself, or `e^{𝔏}`.
fn time_one_map(spec: &ChannelSpec) -> Result<SuperOperator> {
    match spec {
        ChannelSpec::Channel { map, .. } => Ok(map.clone()),
        ChannelSpec::Generator { map, .. } => map.exp(1.0),
    }
}

fn kind(spec: &ChannelSpec) -> &'static str {
    match spec {
        ChannelSpec::Channel { .. } => "channel",
        ChannelSpec::Generator { .. } => "generator",
    }
}

fn validate(cli: &Cli, inputs: &[PathBuf]) -> Result<Outcome> {
    if inputs.is_empty() {
        return Err(QmsError::Parse {
            location: "validate".into(),
            detail: "no input files".into(),
        });
    }
    let mut reports = Vec::new();
    let mut ok = true;
    for path in inputs {
        let spec = load(path)?;
        let map = time_one_map(&spec)?;
        let rep = channel::validate(&map, DEFAULT_POSITIVITY_SAMPLES, cli.seed)?;
        ok &= rep.is_positive_tp() && rep.completely_positive.ok;
        reports.push(json!({
            "input": path.display().to_string(),
            "kind": kind(&spec),
            "validation": to_value(&rep),
        }));
    }
    Ok(Outcome {
        doc: json!({ "command": "validate", "reports": reports }),
        rows: None,
        ok,
    })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

fn check(name: &'static str, lhs: f64, rhs: f64, tol: f64) -> Check {
    Check {
        name,
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
    }
}

fn analyze(cli: &Cli, input: &Path) -> Result<Outcome> {
    let spec = load(input)?;
    let t = time_one_map(&spec)?;
    let validation = channel::validate(&t, DEFAULT_POSITIVITY_SAMPLES, cli.seed)?;
    let fps = spectral::fixed_point_structure(&t)?;
    let states = spectral::stationary_states_from(&fps)?;
    let conditions = stability::condition_numbers(&t, &analysis_opts(cli))?;
    let delta = spectral::transient_part(&t, &fps.projector)?;
    let minpoly = match spectral::minimal_polynomial(&delta) {
        Ok(mp) => to_value(&mp),
        Err(QmsError::IllConditionedStructure(msg)) => json!({ "undecidable": msg }),
        Err(e) => return Err(e),
    };

    let tol = tol(cli);
    let tau_z = conditions.kappa_tau_z.value;
    let mut checks = vec![
        check(
            "spectral_lower <= tau_z",
            conditions.spectral_lower,
            tau_z,
            tol,
        ),
        check(
            "tau_z <= spectral_upper",
            tau_z,
            conditions.spectral_upper,
            tol,
        ),
    ];
    if let Some(kc) = conditions.kappa_contraction {
        checks.push(check("tau_z <= kappa_contraction", tau_z, kc, tol));
    }
    let ok = checks.iter().all(|c| c.holds);
    let doc = json!({
        "command": "analyze",
        "input": input.display().to_string(),
        "kind": kind(&spec),
        "label": spec.label(),
        "validation": to_value(&validation),
        "fixed_points": {
            "multiplicity": fps.multiplicity,
            "unique": states.unique,
            "cesaro": to_value(&fps.cesaro),
            "stationary_states": to_value(&states.states),
        },
        "conditions": to_value(&conditions),
        "minimal_polynomial": minpoly,
        "checks": to_value(&checks),
    });
    Ok(Outcome {
        doc,
        rows: None,
        ok,
    })
}

fn compare(cli: &Cli, p1: &Path, p2: &Path) -> Result<Outcome> {
    let t1 = time_one_map(&load(p1)?)?;
    let t2 = time_one_map(&load(p2)?)?;
    if t1.dim() != t2.dim() {
        return Err(QmsError::Dimension(format!(
            "{} is d = {}, {} is d = {}",
            p1.display(),
            t1.dim(),
            p2.display(),
            t2.dim()
        )));
    }
    let rho2 = match cli.state.first() {
        Some(s) => parse_state(s, t2.dim())?,
        None => {
            let st = spectral::stationary_states(&t2)?;
            if !st.unique {
                return Err(QmsError::Precondition(format!(
                    "{} has {} independent stationary states; choose one with --state",
                    p2.display(),
                    st.states.len()
                )));
            }
            st.states.into_iter().next().expect("one state")
        }
    };
    let out = stability::fixed_point_perturbation(&t1, &t2, &rho2, &analysis_opts(cli))?;
    let tol = tol(cli);
    let rows: Vec<BoundReport> = out
        .bounds
        .iter()
        .filter(|b| b.norm_mode == stability::NormMode::General)
        .map(|b| BoundReport {
            instance: 0,
            n_or_t: f64::INFINITY,
            exact: out.actual_distance,
            bound: b.bound,
            slack: b.slack,
            regime: Regime::Stationary,
            k: None,
            rate: None,
            recipe: None,
            kappa_variant: Some(b.kappa_variant),
            error: None,
        })
        .collect();
    let ok = out.slack() >= -tol
        && out.identity_residual <= stability::TOL_IDENTITY
        && rows.iter().all(|r| r.holds(tol));
    let doc = json!({
        "command": "compare",
        "t1": p1.display().to_string(),
        "t2": p2.display().to_string(),
        "tolerance": tol,
        "outcome": to_value(&out),
        "slack": out.slack(),
    });
    Ok(Outcome {
        doc,
        rows: Some(rows),
        ok,
    })
}

fn pair_arg(cli: &Cli) -> Result<PairArg> {
    cli.pair
        .as_deref()
        .map(PairArg::parse)
        .unwrap_or(Ok(PairArg::Chi2))
}

fn trajectory(cli: &Cli, pt: &Path, pe: &Path) -> Result<Outcome> {
    let st = load(pt)?;
    let se = load(pe)?;
    if st.dim() != se.dim() {
        return Err(QmsError::Dimension(format!(
            "{} is d = {}, {} is d = {}",
            pt.display(),
            st.dim(),
            pe.display(),
            se.dim()
        )));
    }
    let d = st.dim();
    let rho0 = match cli.state.first() {
        Some(s) => parse_state(s, d)?,
        None => DensityMatrix::basis(d, 0),
    };
    let sigma0 = match cli.state.get(1) {
        Some(s) => parse_state(s, d)?,
        None => rho0.clone(),
    };
    let pair_arg = pair_arg(cli)?;
    let vopts = validation_opts(cli);
    let tol = tol(cli);
    let d0 = rho0.distance(&sigma0);

    let (rows, pair, d_pert, asymptotic, limit) = match (&st, &se) {
        (ChannelSpec::Channel { map: t, .. }, ChannelSpec::Channel { map: e, .. }) => {
            let steps = cli.steps.unwrap_or(finite_time::DEFAULT_VALIDATION_STEPS);
            let mut pair = finite_time::derive_pair(t, pair_arg.request(), steps, &vopts)?;
            if pair.is_poisoned() {
                return Ok(refused(pt, pe, &pair));
            }
            let rows = finite_time::discrete_trajectory_check(
                t, e, &rho0, &sigma0, steps, &mut pair, &vopts, 0,
            )?;
            let d_t = contraction::norm_1to1(&(e - t), vopts.restarts, vopts.seed, false)?.value;
            let asym = finite_time::asymptotic_discrete(&pair, d_t)?;
            let lim = finite_time::discrete_limit(&pair, d_t)?;
            (rows, pair, d_t, asym, Some(lim))
        }
        (ChannelSpec::Generator { map: lt, .. }, ChannelSpec::Generator { map: le, .. }) => {
            let samples = cli.steps.unwrap_or(100);
            let t_max = cli.t_max.unwrap_or(20.0);
            let mut pair = continuous_pair(lt, pair_arg, t_max, samples, &vopts)?;
            if pair.is_poisoned() {
                return Ok(refused(pt, pe, &pair));
            }
            let rows = finite_time::continuous_trajectory_check(
                lt, le, &rho0, &sigma0, t_max, samples, &mut pair, &vopts, 0,
            )?;
            let d_l =
                contraction::norm_1to1(&lt.difference(le)?, vopts.restarts, vopts.seed, false)?
                    .value;
            let asym = finite_time::asymptotic_continuous(&pair, d_l)?;
            (rows, pair, d_l, asym, None)
        }
        _ => {
            return Err(QmsError::Validation(
                "trajectory needs two channels or two generators".into(),
            ))
        }
    };
    let ok = rows.iter().all(|r| r.holds(tol));
    let doc = json!({
        "command": "trajectory",
        "t": pt.display().to_string(),
        "e": pe.display().to_string(),
        "tolerance": tol,
        "initial_distance": d0,
        "perturbation_norm": d_pert,
        "pair": to_value(&pair),
        "asymptotic_bound": asymptotic,
        "formula_limit": limit,
        "violations": rows.iter().filter(|r| !r.holds(tol)).count(),
    });
    Ok(Outcome {
        doc,
        rows: Some(rows),
        ok,
    })
}

/// The convergence pair failed validation, so no bound is reported.
fn refused(pt: &Path, pe: &Path, pair: &ConvergencePair) -> Outcome {
    Outcome {
        doc: json!({
            "command": "trajectory",
            "t": pt.display().to_string(),
            "e": pe.display().to_string(),
            "pair": to_value(pair),
            "refused": "convergence pair failed validation",
        }),
        rows: Some(Vec::new()),
        ok: false,
    }
}

fn continuous_pair(
    l: &GeneratorMap,
    arg: PairArg,
    t_max: f64,
    samples: u64,
    opts: &ValidationOptions,
) -> Result<ConvergencePair> {
    finite_time::derive_continuous_pair(
        l,
        arg.request(),
        DEFAULT_CONTINUOUS_STEP,
        t_max,
        samples,
        opts,
    )
}

fn pairs(cli: &Cli, input: &Path) -> Result<Outcome> {
    let spec = load(input)?;
    let vopts = validation_opts(cli);
    let minpoly_mu = match cli.pair.as_deref().map(PairArg::parse).transpose()? {
        Some(PairArg::MinimalPolynomial(mu)) => Some(mu),
        _ => None,
    };
    let mut entries = Vec::new();
    let mut ok = true;
    let mut record = |name: &str, r: Result<ConvergencePair>| -> Result<()> {
        match r {
            Ok(p) => {
                ok &= !p.is_poisoned();
                entries.push(json!({ "recipe": name, "pair": to_value(&p) }));
                Ok(())
            }
            Err(e) if e.is_numeric() => Err(e),
            Err(e) => {
                entries.push(json!({ "recipe": name, "unavailable": e.to_string() }));
                Ok(())
            }
        }
    };
    match &spec {
        ChannelSpec::Channel { map: t, .. } => {
            let steps = cli.steps.unwrap_or(finite_time::DEFAULT_VALIDATION_STEPS);
            let mu = match minpoly_mu {
                Some(mu) => mu,
                None => (1.0 + spectral::spectral_quantities(t)?.subdominant_modulus) / 2.0,
            };
            for (name, req) in [
                ("chi2", PairRequest::Chi2),
                ("detailed_balance", PairRequest::DetailedBalance),
                ("minimal_polynomial", PairRequest::MinimalPolynomial { mu }),
            ] {
                record(name, finite_time::derive_pair(t, req, steps, &vopts))?;
            }
        }
        ChannelSpec::Generator { map: l, .. } => {
            let samples = cli.steps.unwrap_or(100);
            let t_max = cli.t_max.unwrap_or(20.0);
            let th = l.exp(DEFAULT_CONTINUOUS_STEP)?;
            let mu = match minpoly_mu {
                Some(mu) => mu,
                None => (1.0 + spectral::spectral_quantities(&th)?.subdominant_modulus) / 2.0,
            };
            for (name, arg) in [
                ("chi2", PairArg::Chi2),
                ("detailed_balance", PairArg::DetailedBalance),
                ("minimal_polynomial", PairArg::MinimalPolynomial(mu)),
            ] {
                record(name, continuous_pair(l, arg, t_max, samples, &vopts))?;
            }
        }
    }
    let doc = json!({
        "command": "pairs",
        "input": input.display().to_string(),
        "kind": kind(&spec),
        "pairs": entries,
    });
    Ok(Outcome {
        doc,
        rows: None,
        ok,
    })
}

fn ensemble(
    cli: &Cli,
    dim: usize,
    count: usize,
    eps: f64,
    kraus_rank: Option<usize>,
    mode: ModeArg,
) -> Result<Outcome> {
    let mode = match mode {
        ModeArg::Discrete => EnsembleMode::Discrete,
        ModeArg::Continuous => EnsembleMode::Continuous,
    };
    let mut config = EnsembleConfig::new(dim, count, cli.seed);
    config.perturbation_eps = eps;
    config.kraus_rank = kraus_rank;
    config.mode = mode;
    config.restarts = cli.restarts;
    config.pair = pair_arg(cli)?.request();
    if let Some(s) = cli.steps {
        config.steps = s;
    } else if mode == EnsembleMode::Continuous {
        config.steps = 100;
    }
    if let Some(t) = cli.t_max {
        config.t_max = t;
    }
    let rows = ensembles::sweep(&config)?;
    let tol = tol(cli);
    let errors = rows.iter().filter(|r| r.regime == Regime::Error).count();
    let violations = rows
        .iter()
        .filter(|r| r.regime != Regime::Error && !r.holds(tol))
        .count();
    let doc = json!({
        "command": "ensemble",
        "config": to_value(&config),
        "tolerance": tol,
        "instances": count,
        "error_rows": errors,
        "violations": violations,
    });
    Ok(Outcome {
        doc,
        rows: Some(rows),
        ok: violations == 0,
    })
}

fn emit(cli: &Cli, outcome: &Outcome, stdout: &mut dyn Write) -> Result<()> {
    let mut buf = Vec::new();
    match cli.format {
        Format::Json => {
            let mut doc = outcome.doc.clone();
            if let (Some(rows), Value::Object(map)) = (&outcome.rows, &mut doc) {
                map.insert("rows".into(), to_value(rows));
            }
            // Going through `Value` sorts keys, so re-serializing parsed
            // output reproduces it byte for byte.
            serde_json::to_writer_pretty(&mut buf, &doc).map_err(|e| QmsError::Io(e.into()))?;
            buf.push(b'\n');
        }
        Format::Csv => report::write_csv(&mut buf, outcome.rows.as_deref().unwrap_or(&[]))?,
        Format::Text => {
            write_text(&mut buf, "", &outcome.doc)?;
            if let Some(rows) = &outcome.rows {
                write_rows_text(&mut buf, rows)?;
            }
        }
    }
    match &cli.out {
        Some(path) => std::fs::write(path, &buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn number_text(v: &Value) -> String {
    match v.as_f64() {
        Some(x) if v.is_f64() => format_sig(x, TEXT_DIGITS),
        _ => v.to_string(),
    }
}

fn is_complex_pair(items: &[Value]) -> bool {
    items.len() == 2 && items.iter().all(Value::is_number)
}

/// Flattens a JSON document into `path: value` lines.
fn write_text(out: &mut Vec<u8>, path: &str, v: &Value) -> Result<()> {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let p = if path.is_empty() {
                    k.clone()
                } else {
                    format!("{path}.{k}")
                };
                write_text(out, &p, child)?;
            }
        }
        Value::Array(items) if is_complex_pair(items) => {
            writeln!(
                out,
                "{path}: [{}, {}]",
                number_text(&items[0]),
                number_text(&items[1])
            )?;
        }
        Value::Array(items) if items.is_empty() => writeln!(out, "{path}: []")?,
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                write_text(out, &format!("{path}[{i}]"), child)?;
            }
        }
        Value::Number(_) => writeln!(out, "{path}: {}", number_text(v))?,
        Value::String(s) => writeln!(out, "{path}: {s}")?,
        Value::Bool(b) => writeln!(out, "{path}: {b}")?,
        Value::Null => writeln!(out, "{path}: null")?,
    }
    Ok(())
}

fn write_rows_text(out: &mut Vec<u8>, rows: &[BoundReport]) -> Result<()> {
    writeln!(out, "{}", report::CSV_HEADER.join("  "))?;
    let f = |x: Option<f64>| {
        x.map(|x| format_sig(x, TEXT_DIGITS))
            .unwrap_or_else(|| "-".into())
    };
    for r in rows {
        writeln!(
            out,
            "{}  {}  {}  {}  {}  {}  {}  {}  {}  {}",
            r.instance,
            format_sig(r.n_or_t, TEXT_DIGITS),
            format_sig(r.exact, TEXT_DIGITS),
            format_sig(r.bound, TEXT_DIGITS),
            format_sig(r.slack, TEXT_DIGITS),
            r.regime.as_str(),
            f(r.k),
            f(r.rate),
            r.recipe.map_or("-", |x| x.as_str()),
            r.kappa_variant.map_or("-", |x| x.as_str()),
        )?;
        if let Some(e) = &r.error {
            writeln!(out, "  error: {e}")?;
        }
    }
    Ok(())
}
