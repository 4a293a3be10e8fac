//! `heinz` command-line front end.
//!
//! Exit codes: `0` every verdict matched its registered expectation, `1` at
//! least one did not, `2` usage error, `3` numerical or I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use heinz_core::chains::{
    counterexample_instance, falsify_r0_generalization, list_theorems, sweep_f, REFERENCE_LHS, REFERENCE_RHS,
    REFERENCE_TOL,
};
use heinz_core::suite::{seeded_instance, DEFAULT_SPREAD};
use heinz_core::{
    emit_report, evaluate_chain, run_suite, write_report, ChainParams, ChainReport, Error, EvalConfig, HeinzProfile,
    NormKind, ReportFormat, SuiteConfig, TheoremId,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNEXPECTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "heinz", version, about = "Numerical checks of Heinz-type norm inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the registered theorem ids with their parameters.
    List,
    /// Evaluate one chain on a seeded instance.
    Verify(VerifyArgs),
    /// Run chains over a population of seeded instances.
    Suite(SuiteArgs),
    /// Reproduce the embedded counterexample.
    Counterexample,
    /// Print `nu,F(nu)` over a grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct InstanceArgs {
    /// Norm: op | tr | fro | sch:<p> | kyfan:<k>.
    #[arg(long, default_value = "tr")]
    norm: NormKind,
    /// Instance seed (the `instance_seed` column of a suite report).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = DEFAULT_SPREAD)]
    spread: f64,
}

impl InstanceArgs {
    fn profile(&self) -> heinz_core::Result<HeinzProfile> {
        Ok(HeinzProfile::new(seeded_instance(self.dim, self.seed, self.norm, self.spread)?))
    }
}

/// Shortcut flags; each is equivalent to `--param name=value`.
#[derive(Debug, Args)]
struct NamedParams {
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    nu: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    y: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
}

impl NamedParams {
    fn pairs(&self) -> [(&'static str, Option<f64>); 14] {
        [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("mu", self.mu),
            ("nu", self.nu),
            ("t", self.t),
            ("r", self.r),
            ("lambda", self.lambda),
            ("eta", self.eta),
            ("n", self.n),
            ("p", self.p),
            ("q", self.q),
            ("y", self.y),
            ("a", self.a),
            ("b", self.b),
        ]
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Theorem id, as printed by `list`.
    theorem: TheoremId,
    /// Chain parameter `name=value`; repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", value_parser = parse_param, allow_negative_numbers = true)]
    params: Vec<(String, f64)>,
    #[command(flatten)]
    named: NamedParams,
    #[command(flatten)]
    instance: InstanceArgs,
    /// Relative chain tolerance (default: $HEINZ_TOL_CHAIN or 1e-8).
    #[arg(long)]
    tol: Option<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "tr,fro,op,sch:3,kyfan:2")]
    norms: Vec<NormKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative chain tolerance (default: $HEINZ_TOL_CHAIN or 1e-8).
    #[arg(long)]
    tol: Option<f64>,
    /// Theorem ids to run; all when omitted.
    #[arg(long, value_delimiter = ',')]
    theorems: Vec<TheoremId>,
    #[arg(long, default_value_t = DEFAULT_SPREAD)]
    spread: f64,
    /// Report path; the summary alone is printed when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// `start:end:count` (inclusive, evenly spaced) or a comma list.
    #[arg(long, default_value = "0:1:21")]
    nu_grid: String,
    /// Sweep the embedded counterexample instead of a seeded instance.
    #[arg(long)]
    counterexample: bool,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_param(raw: &str) -> Result<(String, f64), String> {
    let (name, value) = raw.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{raw}`"))?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("`{value}`: {e}"))?;
    Ok((name.trim().to_string(), value))
}

pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let spec = spec.trim();
    if let Some((start, rest)) = spec.split_once(':') {
        let (end, count) = rest.split_once(':').ok_or("range grid must be start:end:count")?;
        let start: f64 = start.trim().parse().map_err(|e| format!("grid start: {e}"))?;
        let end: f64 = end.trim().parse().map_err(|e| format!("grid end: {e}"))?;
        let count: usize = count.trim().parse().map_err(|e| format!("grid count: {e}"))?;
        return match count {
            0 => Err("grid count must be positive".into()),
            1 => Ok(vec![start]),
            _ => Ok((0..count)
                .map(|k| start + (end - start) * k as f64 / (count - 1) as f64)
                .collect()),
        };
    }
    spec.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| format!("grid value `{s}`: {e}")))
        .collect()
}

enum Failure {
    Usage(String),
    Hard(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::UnknownTheorem(_)
            | Error::InvalidNorm(_)
            | Error::OutOfDomain { .. } => Failure::Usage(e.to_string()),
            other => Failure::Hard(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Hard(e.into())
    }
}

fn eval_config(tol: Option<f64>) -> Result<EvalConfig, Failure> {
    let cfg = match tol {
        Some(tol_chain) => EvalConfig {
            tol_chain,
            ..EvalConfig::default()
        },
        None => EvalConfig::from_env()?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn status(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_UNEXPECTED
    }
}

fn print_report(out: &mut dyn Write, r: &ChainReport) -> std::io::Result<()> {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let norm = r.norm.map(|n| format!(" [{n}]")).unwrap_or_default();
    writeln!(out, "{}{norm}  {}", r.theorem_id, params.join(" "))?;
    let width = r.terms.iter().map(|t| t.label.len()).max().unwrap_or(0);
    for (i, t) in r.terms.iter().enumerate() {
        let margin = r.margins.get(i).map(|m| format!("  {m:+.6e}")).unwrap_or_default();
        writeln!(out, "  {i:>2}  {:<width$}  {:>24.16e}{margin}", t.label, t.value)?;
    }
    for (k, v) in &r.diagnostics {
        writeln!(out, "  diagnostic {k} = {v:.3e}")?;
    }
    writeln!(
        out,
        "verdict: {} (expected {}, tolerance {:.3e})",
        r.verdict, r.expected, r.tolerance
    )
}

fn cmd_list(out: &mut dyn Write) -> Result<i32, Failure> {
    for info in list_theorems() {
        writeln!(out, "{:<11} expect {:<9} {}", info.id.as_str(), info.expected.to_string(), info.summary)?;
        for p in info.params {
            let default = p.default.map(|d| format!(" (default {d})")).unwrap_or_default();
            writeln!(out, "{:>13} {} in {}{default}", "", p.name, p.range)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(args: VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = eval_config(args.tol)?;
    let mut params = ChainParams::new();
    for (name, value) in args.named.pairs() {
        if let Some(v) = value {
            params.set(name, v);
        }
    }
    for (name, value) in &args.params {
        params.set(name, *value);
    }
    let id = args.theorem;
    let profile = if id.info().uses_instance {
        Some(args.instance.profile()?)
    } else {
        None
    };
    let mut report = evaluate_chain(id, profile.as_ref(), &params, &cfg)?;
    if profile.is_some() {
        report.instance_seed = Some(args.instance.seed);
    }
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(Error::from)?)?;
    } else {
        print_report(out, &report)?;
    }
    Ok(status(report.is_expected()))
}

fn cmd_suite(args: SuiteArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let eval = eval_config(args.tol)?;
    let cfg = SuiteConfig {
        trials: args.trials,
        dims: args.dims,
        norms: args.norms,
        seed: args.seed,
        tol_chain: eval.tol_chain,
        theorems: args.theorems,
        spread: args.spread,
        quadrature: eval.quadrature,
        output: args.out,
        format: args.format,
    };
    let result = run_suite(&cfg)?;
    if let Some(path) = &cfg.output {
        write_report(&result, cfg.format, path)?;
    }
    let c = result.counts;
    writeln!(
        out,
        "{} reports: {} holds, {} violated, {} degenerate; {} unexpected; {:.2} s",
        result.reports.len(),
        c.holds,
        c.violated,
        c.degenerate,
        result.unexpected,
        result.wall_time_secs
    )?;
    for (id, m) in &result.worst_margins {
        let bad = result.for_theorem(*id).filter(|r| !r.is_expected()).count();
        writeln!(out, "  {:<11} worst relative margin {m:+.3e}  unexpected {bad}", id.as_str())?;
    }
    if cfg.output.is_none() && cfg.format == ReportFormat::Csv {
        write!(out, "{}", emit_report(&result, ReportFormat::Csv)?)?;
    }
    Ok(status(result.unexpected == 0))
}

fn cmd_counterexample(out: &mut dyn Write) -> Result<i32, Failure> {
    let report = falsify_r0_generalization(&EvalConfig::default())?;
    let lhs = report.terms[0].value;
    let rhs = report.terms[1].value;
    writeln!(out, "nu = {}, trace norm", report.params.get("nu").unwrap_or(f64::NAN))?;
    for (name, got, reference) in [("lhs", lhs, REFERENCE_LHS), ("rhs", rhs, REFERENCE_RHS)] {
        let flag = if (got - reference).abs() <= REFERENCE_TOL { "within" } else { "outside" };
        writeln!(
            out,
            "{name} = {got:.6}  (reference {reference}, {flag} +-{REFERENCE_TOL})",
        )?;
    }
    writeln!(out, "lhs - rhs = {:.6}", lhs - rhs)?;
    let reproduced = report.is_expected();
    writeln!(
        out,
        "verdict: {} ({})",
        report.verdict,
        if reproduced { "violation reproduced" } else { "violation NOT reproduced" }
    )?;
    Ok(status(reproduced))
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let grid = parse_grid(&args.nu_grid).map_err(Failure::Usage)?;
    let profile = if args.counterexample {
        HeinzProfile::new(counterexample_instance()?)
    } else {
        args.instance.profile()?
    };
    let mut doc = String::from("nu,F\n");
    for (nu, f) in sweep_f(&profile, &grid)? {
        doc.push_str(&format!("{nu:.16e},{f:.16e}\n"));
    }
    match &args.out {
        Some(path) => std::fs::write(path, doc)?,
        None => out.write_all(doc.as_bytes())?,
    }
    Ok(EXIT_OK)
}

/// Runs the CLI on `argv` (including the program name) and returns the exit
/// code. Normal output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let outcome = match cli.command {
        Command::List => cmd_list(out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Suite(a) => cmd_suite(a, out),
        Command::Counterexample => cmd_counterexample(out),
        Command::Sweep(a) => cmd_sweep(a, out),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Hard(Error::Io(e))) if e.kind() == std::io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(Failure::Hard(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}
