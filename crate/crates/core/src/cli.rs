//! The `pssmfa` command line.
//!
//! Every flag can also come from a TOML file given with `--config`; keys are
//! the flag names (`max-dense` or `max_dense`). Flags win over the file, and
//! the file wins over `PSSMFA_THREADS`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::bounds::{theorem1_check, TheoremHypothesis};
use crate::error::Error;
use crate::fidelity::{FidelityResult, Method};
use crate::pss::{check_party_symmetry, check_site_symmetry, expand_state, DenseBudget, PssState};
use crate::rdm::{diagram_params, ParamsJson};
use crate::scan::{evaluate, rectangular_cases, run_scan, to_csv, to_json, ScanCase};
use crate::verify::{run_all, Fault, VerifyConfig};
use crate::young::{enumerate_diagrams, YoungDiagram};

pub const THREADS_ENV: &str = "PSSMFA_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::Parse(_) | Error::Domain(_) | Error::NotCovered(_)) => 2,
            CliError::Core(Error::Budget { .. }) => 3,
            CliError::VerifyFailed(_) => 4,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser, Debug)]
#[command(name = "pssmfa", version, about = "Mean-field fidelity of party-site-symmetric boson states")]
pub struct Cli {
    /// TOML file with default values for any flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: PSSMFA_THREADS, then all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest dense state vector or matrix, in entries (accepts 1e6).
    #[arg(long, global = true, value_parser = parse_count)]
    pub max_dense: Option<usize>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the Young-diagram basis of n bosons on d sites.
    Enumerate(CaseArgs),
    /// Fidelity of one case by each requested method.
    Fidelity(FidelityArgs),
    /// Fidelity over ranges of cases, as CSV or JSON rows.
    Scan(ScanArgs),
    /// Run the acceptance criteria.
    Verify(VerifyArgs),
    /// Exact rho1/rho2 parameters of a basis diagram.
    Params(CaseArgs),
    /// Constituents of the no-isolated-particle bound for a state.
    Bounds(BoundsArgs),
}

#[derive(Args, Debug, Default)]
pub struct CaseArgs {
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    /// Row lengths, e.g. 3,2,1.
    #[arg(long)]
    pub diagram: Option<String>,
    /// PSSState JSON file.
    #[arg(long)]
    pub state: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FidelityArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    /// oracle, params, closed or all; comma-separated lists allowed.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// Values such as 2,4,10..20 (ranges inclusive).
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    /// Diagrams to scan over d; repeat the flag or separate with ';'.
    #[arg(long)]
    pub diagram: Vec<String>,
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub method: Option<String>,
    /// Fill the runtime_ms column (makes output timing-dependent).
    #[arg(long)]
    pub timing: bool,
    /// Drop cases whose dense state exceeds --max-dense.
    #[arg(long)]
    pub only_dense: bool,
    /// Drop rectangular cases without a closed form.
    #[arg(long)]
    pub covered_only: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Tolerance added to 1/2 in the no-isolated-particle sweep.
    #[arg(long)]
    pub slack: Option<f64>,
    /// Criteria to skip, e.g. 3 or 3,7.
    #[arg(long)]
    pub skip: Option<String>,
    /// Deliberate defect the suite must detect (b3-sign).
    #[arg(long)]
    pub inject_fault: Option<String>,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub case: CaseArgs,
    /// c in |A| <= c/d^2 (default 2 k_max).
    #[arg(long)]
    pub a_coefficient: Option<f64>,
    #[arg(long)]
    pub d_min: Option<usize>,
    /// Factor in the d >= factor * n sqrt(n) regime flag.
    #[arg(long)]
    pub dilution: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// A scalar config value written as a number or a string.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ConfigValue {
    Int(u64),
    Float(f64),
    Text(String),
}

impl ConfigValue {
    fn text(&self) -> String {
        match self {
            ConfigValue::Int(i) => i.to_string(),
            ConfigValue::Float(x) => x.to_string(),
            ConfigValue::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<ConfigValue>,
    pub d: Option<ConfigValue>,
    pub k: Option<ConfigValue>,
    pub diagram: Option<OneOrMany>,
    pub state: Option<PathBuf>,
    pub method: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    #[serde(alias = "max_dense")]
    pub max_dense: Option<ConfigValue>,
    pub slack: Option<f64>,
    pub timing: Option<bool>,
    #[serde(alias = "only_dense")]
    pub only_dense: Option<bool>,
    #[serde(alias = "covered_only")]
    pub covered_only: Option<bool>,
    pub skip: Option<ConfigValue>,
    #[serde(alias = "a_coefficient")]
    pub a_coefficient: Option<f64>,
    #[serde(alias = "d_min")]
    pub d_min: Option<usize>,
    pub dilution: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_owned(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }

    fn diagrams(&self) -> Vec<String> {
        match &self.diagram {
            None => Vec::new(),
            Some(OneOrMany::One(s)) => vec![s.clone()],
            Some(OneOrMany::Many(v)) => v.clone(),
        }
    }
}

/// Integer that may be written in scientific notation.
pub fn parse_count(s: &str) -> std::result::Result<usize, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if !(x >= 1.0 && x.fract() == 0.0 && x <= usize::MAX as f64) {
        return Err(format!("'{s}' is not a positive integer"));
    }
    Ok(x as usize)
}

/// Comma-separated integers and inclusive ranges `a..b` (or `a..=b`).
pub fn parse_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo = parse_count(lo).or_else(|e| if lo.trim() == "0" { Ok(0) } else { Err(e) })?;
            let hi = parse_count(hi)?;
            if lo > hi {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(part.parse::<usize>().map_err(|_| format!("'{part}' is not a non-negative integer"))?);
        }
    }
    if out.is_empty() {
        return Err(format!("'{s}' lists no values"));
    }
    Ok(out)
}

fn parse_methods(s: &str) -> CliResult<Vec<Method>> {
    if s.trim() == "all" {
        return Ok(Method::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        let m: Method = part.parse().map_err(|_| usage(format!("unknown method '{part}' (oracle, params, closed, all)")))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    Ok(out)
}

fn single(s: &str, flag: &str) -> CliResult<usize> {
    match parse_list(s).map_err(|e| usage(format!("--{flag}: {e}")))?.as_slice() {
        [v] => Ok(*v),
        _ => Err(usage(format!("--{flag} takes a single value here"))),
    }
}

fn parse_diagram(s: &str) -> CliResult<YoungDiagram> {
    s.parse().map_err(|e: Error| usage(format!("--diagram '{s}': {e}")))
}

struct Settings {
    cfg: FileConfig,
    budget: DenseBudget,
    explicit_budget: bool,
    format: Option<Format>,
    out: Option<PathBuf>,
    threads: Option<usize>,
}

impl Settings {
    fn resolve(cli: &Cli) -> CliResult<Self> {
        let cfg = match &cli.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let max_dense = match (cli.max_dense, &cfg.max_dense) {
            (Some(v), _) => Some(v),
            (None, Some(v)) => Some(parse_count(&v.text()).map_err(|e| usage(format!("max-dense: {e}")))?),
            (None, None) => None,
        };
        let threads = match cli.threads.or(cfg.threads) {
            Some(t) => Some(t),
            None => match std::env::var(THREADS_ENV) {
                Ok(v) if !v.trim().is_empty() => Some(
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| usage(format!("{THREADS_ENV}='{v}' is not a thread count")))?,
                ),
                _ => None,
            },
        };
        Ok(Self {
            budget: max_dense.map(DenseBudget::new).unwrap_or_default(),
            explicit_budget: max_dense.is_some(),
            format: cli.format.or(cfg.format),
            out: cli.out.clone().or_else(|| cfg.out.clone()),
            threads,
            cfg,
        })
    }

    fn emit(&self, text: &str) -> CliResult<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            }),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Io {
                        path: "<stdout>".into(),
                        source,
                    })
            }
        }
    }
}

fn or_cfg(flag: &Option<String>, cfg: &Option<ConfigValue>) -> Option<String> {
    flag.clone().or_else(|| cfg.as_ref().map(ConfigValue::text))
}

/// The single case named by `--n/--d/--k/--diagram/--state`.
enum Target {
    Case(ScanCase),
    NoShape,
}

fn resolve_target(args: &CaseArgs, cfg: &FileConfig) -> CliResult<Target> {
    let n = or_cfg(&args.n, &cfg.n).map(|s| single(&s, "n")).transpose()?;
    let d = or_cfg(&args.d, &cfg.d).map(|s| single(&s, "d")).transpose()?;
    let k = or_cfg(&args.k, &cfg.k).map(|s| single(&s, "k")).transpose()?;
    let diagram = args.diagram.clone().or_else(|| cfg.diagrams().into_iter().next());
    let state = args.state.clone().or_else(|| cfg.state.clone());
    if let Some(path) = state {
        if diagram.is_some() || k.is_some() {
            return Err(usage("--state excludes --diagram and --k"));
        }
        let psi = load_state(&path)?;
        if n.is_some_and(|n| n != psi.n()) || d.is_some_and(|d| d != psi.d()) {
            return Err(usage("--n/--d disagree with the state file"));
        }
        return Ok(Target::Case(ScanCase::state(psi)));
    }
    let d = d.ok_or_else(|| usage("--d is required"))?;
    if let Some(s) = diagram {
        let y = parse_diagram(&s)?;
        if n.is_some_and(|n| n != y.n()) {
            return Err(usage(format!("diagram {y} has {} blocks, not --n {}", y.n(), n.unwrap_or(0))));
        }
        if k.is_some() {
            return Err(usage("--diagram excludes --k"));
        }
        return Ok(Target::Case(ScanCase::diagram(y, d)));
    }
    let n = n.ok_or_else(|| usage("give --diagram, --state, or --n"))?;
    match k {
        Some(k) => {
            YoungDiagram::rectangle(n, k).map_err(|e| usage(e.to_string()))?;
            Ok(Target::Case(ScanCase::rectangle(n, k, d)))
        }
        None => Ok(Target::NoShape),
    }
}

fn load_state(path: &Path) -> CliResult<PssState> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    let (psi, factor) = PssState::from_json(&text)?;
    if (factor - 1.0).abs() > 1e-12 {
        eprintln!("note: state normalized by factor {factor}");
    }
    Ok(psi)
}

#[derive(Serialize)]
struct EnumerateRow {
    diagram: String,
    k: usize,
    p: usize,
    runs: String,
    #[serde(rename = "A_y")]
    a_y: String,
    has_isolated: bool,
}

fn cmd_enumerate(args: &CaseArgs, s: &Settings) -> CliResult<()> {
    let n = or_cfg(&args.n, &s.cfg.n).ok_or_else(|| usage("--n is required"))?;
    let d = or_cfg(&args.d, &s.cfg.d).ok_or_else(|| usage("--d is required"))?;
    let (n, d) = (single(&n, "n")?, single(&d, "d")?);
    if n == 0 || d == 0 {
        return Err(usage("--n and --d must be positive"));
    }
    let rows: Vec<EnumerateRow> = enumerate_diagrams(n, d)?
        .iter()
        .map(|y| {
            let runs = y.runs();
            let runs_text: Vec<String> = runs.entries.iter().map(|r| format!("{}^{}", r.length, r.count)).collect();
            Ok(EnumerateRow {
                diagram: y.to_string(),
                k: y.k(),
                p: runs.p(),
                runs: runs_text.join(" "),
                a_y: y.normalization_constant(d)?.to_string(),
                has_isolated: y.has_isolated_particles(),
            })
        })
        .collect::<CliResult<_>>()?;
    let text = match s.format.unwrap_or(Format::Table) {
        Format::Json => serde_json::to_string_pretty(&rows).map_err(Error::from)? + "\n",
        Format::Csv => {
            let mut t = String::from("diagram,k,p,runs,A_y,has_isolated\n");
            for r in &rows {
                let _ = writeln!(t, "\"{}\",{},{},{},{},{}", r.diagram, r.k, r.p, r.runs, r.a_y, r.has_isolated);
            }
            t
        }
        Format::Table => {
            let w = rows.iter().map(|r| r.diagram.len()).max().unwrap_or(0).max(7);
            let mut t = format!("{:<w$}  {:>3}  {:>3}  {:<12}  {:>14}  isolated\n", "diagram", "k", "p", "runs", "A_y");
            for r in &rows {
                let _ = writeln!(t, "{:<w$}  {:>3}  {:>3}  {:<12}  {:>14}  {}", r.diagram, r.k, r.p, r.runs, r.a_y, if r.has_isolated { "yes" } else { "no" });
            }
            t
        }
    };
    s.emit(&text)
}

#[derive(Serialize)]
struct Difference {
    a: Method,
    b: Method,
    abs: f64,
}

#[derive(Serialize)]
struct Skip {
    method: Method,
    reason: String,
}

#[derive(Serialize)]
struct Symmetry {
    party_defect: f64,
    site_defect: f64,
}

#[derive(Serialize)]
struct FidelityReport {
    n: usize,
    d: usize,
    case: String,
    results: Vec<FidelityResult>,
    differences: Vec<Difference>,
    skipped: Vec<Skip>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry: Option<Symmetry>,
}

fn cmd_fidelity(args: &FidelityArgs, s: &Settings) -> CliResult<()> {
    let case = match resolve_target(&args.case, &s.cfg)? {
        Target::Case(c) => c,
        Target::NoShape => return Err(usage("give --k, --diagram or --state")),
    };
    let methods = parse_methods(args.method.as_deref().or(s.cfg.method.as_deref()).unwrap_or("all"))?;
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    let mut first_err = None;
    for &m in &methods {
        match evaluate(&case, m, s.budget) {
            Ok(r) => results.push(r),
            Err(e) => {
                skipped.push(Skip {
                    method: m,
                    reason: e.to_string(),
                });
                first_err.get_or_insert(e);
            }
        }
    }
    if results.is_empty() {
        for sk in &skipped {
            eprintln!("{}: {}", sk.method, sk.reason);
        }
        return Err(first_err.map(CliError::Core).unwrap_or_else(|| usage("no method requested")));
    }
    let mut differences = Vec::new();
    for (i, a) in results.iter().enumerate() {
        for b in &results[i + 1..] {
            differences.push(Difference {
                a: a.method,
                b: b.method,
                abs: (a.value - b.value).abs(),
            });
        }
    }
    let symmetry = match &case.shape {
        crate::scan::CaseShape::State(psi) if methods.contains(&Method::Oracle) => expand_state::<f64>(psi, s.budget)
            .ok()
            .map(|dense| Symmetry {
                party_defect: check_party_symmetry(&dense),
                site_defect: check_site_symmetry(&dense),
            }),
        _ => None,
    };
    let report = FidelityReport {
        n: case.n,
        d: case.d,
        case: case.label(),
        results,
        differences,
        skipped,
        symmetry,
    };
    let text = match s.format.unwrap_or(Format::Table) {
        Format::Json => serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n",
        Format::Csv => {
            let rows = crate::scan::evaluate_case(&case, &methods, s.budget, false)?;
            to_csv(&rows)?
        }
        Format::Table => fidelity_table(&report),
    };
    s.emit(&text)
}

fn fidelity_table(r: &FidelityReport) -> String {
    let mut t = format!("n={} d={} {}\n", r.n, r.d, r.case);
    let _ = writeln!(t, "{:<12} {:<22} {:<14} exact", "method", "F", "clipped_mass");
    for res in &r.results {
        let _ = writeln!(
            t,
            "{:<12} {:<22} {:<14} {}",
            res.method.as_str(),
            res.value,
            res.clipped_mass,
            res.exact.as_deref().unwrap_or("")
        );
    }
    for d in &r.differences {
        let _ = writeln!(t, "|{} - {}| = {:.3e}", d.a, d.b, d.abs);
    }
    for sk in &r.skipped {
        let _ = writeln!(t, "skipped {}: {}", sk.method, sk.reason);
    }
    if let Some(sym) = &r.symmetry {
        let _ = writeln!(t, "party-symmetry defect {:.3e}, site-symmetry defect {:.3e}", sym.party_defect, sym.site_defect);
    }
    t
}

fn cmd_scan(args: &ScanArgs, s: &Settings) -> CliResult<()> {
    let cfg = &s.cfg;
    let methods = parse_methods(args.method.as_deref().or(cfg.method.as_deref()).unwrap_or("all"))?;
    let timing = args.timing || cfg.timing.unwrap_or(false);
    let only_dense = args.only_dense || cfg.only_dense.unwrap_or(false);
    let covered_only = args.covered_only || cfg.covered_only.unwrap_or(false);
    let list = |flag: &Option<String>, c: &Option<ConfigValue>, name: &str| -> CliResult<Option<Vec<usize>>> {
        or_cfg(flag, c)
            .map(|v| parse_list(&v).map_err(|e| usage(format!("--{name}: {e}"))))
            .transpose()
    };
    let ns = list(&args.n, &cfg.n, "n")?;
    let ds = list(&args.d, &cfg.d, "d")?;
    let ks = list(&args.k, &cfg.k, "k")?;
    let mut diagram_texts: Vec<String> = args.diagram.iter().flat_map(|d| d.split(';').map(str::to_owned)).collect();
    if diagram_texts.is_empty() {
        diagram_texts = cfg.diagrams();
    }
    let state = args.state.clone().or_else(|| cfg.state.clone());

    let cases: Vec<ScanCase> = if let Some(path) = state {
        vec![ScanCase::state(load_state(&path)?)]
    } else {
        let ds = ds.ok_or_else(|| usage("--d is required"))?;
        if !diagram_texts.is_empty() {
            let mut cases = Vec::new();
            for text in diagram_texts.iter().filter(|t| !t.trim().is_empty()) {
                let y = parse_diagram(text.trim())?;
                for &d in &ds {
                    if y.k() <= d && (!only_dense || s.budget.fits(y.n(), d)) {
                        cases.push(ScanCase::diagram(y.clone(), d));
                    }
                }
            }
            cases
        } else {
            let ns = ns.ok_or_else(|| usage("--n is required"))?;
            let ks = ks.unwrap_or_else(|| (1..=ns.iter().copied().max().unwrap_or(1)).collect());
            rectangular_cases(&ns, &ks, &ds, s.budget, only_dense, covered_only)
        }
    };
    if cases.is_empty() {
        return Err(usage("the scan selects no cases"));
    }
    let rows = run_scan(&cases, &methods, s.budget, timing)?;
    let text = match s.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&rows)?,
        _ => to_csv(&rows)?,
    };
    s.emit(&text)
}

fn cmd_verify(args: &VerifyArgs, s: &Settings) -> CliResult<()> {
    let skip = match args.skip.clone().or_else(|| s.cfg.skip.as_ref().map(ConfigValue::text)) {
        Some(text) => parse_list(&text)
            .map_err(|e| usage(format!("--skip: {e}")))?
            .into_iter()
            .map(|v| u32::try_from(v).map_err(|_| usage("--skip: criterion id too large")))
            .collect::<CliResult<Vec<u32>>>()?,
        None => Vec::new(),
    };
    let fault = args.inject_fault.as_deref().map(Fault::from_str).transpose()?;
    let defaults = VerifyConfig::default();
    let cfg = VerifyConfig {
        max_dense: if s.explicit_budget { s.budget.max_entries } else { defaults.max_dense },
        slack: args.slack.or(s.cfg.slack).unwrap_or(defaults.slack),
        skip,
        fault,
    };
    let json = s.format == Some(Format::Json);
    let report = run_all(&cfg, |c| {
        if json {
            eprintln!("{c}");
        } else {
            println!("{c}");
            for f in &c.failures {
                println!("    {f}");
            }
        }
    });
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n";
    if json || s.out.is_some() {
        s.emit(&text)?;
    }
    if report.passed {
        Ok(())
    } else {
        let failed: Vec<String> = report
            .criteria
            .iter()
            .filter(|c| !c.skipped && !c.passed)
            .map(|c| format!("criterion {} ({})", c.id, c.name))
            .collect();
        Err(CliError::VerifyFailed(failed.join(", ")))
    }
}

fn basis_of(case: &ScanCase) -> CliResult<YoungDiagram> {
    case.basis_diagram()?.ok_or_else(|| usage("exact parameters need a single diagram, not --state"))
}

fn cmd_params(args: &CaseArgs, s: &Settings) -> CliResult<()> {
    let case = match resolve_target(args, &s.cfg)? {
        Target::Case(c) => c,
        Target::NoShape => return Err(usage("give --k or --diagram")),
    };
    let (p1, p2) = diagram_params(&basis_of(&case)?, case.d)?;
    let json = ParamsJson::new(&p1, &p2);
    match s.format.unwrap_or(Format::Json) {
        Format::Table => {
            let mut t = format!("diagram {} d={}\n", case.label(), case.d);
            let mut line = |name: &str, v: &num_rational::BigRational| {
                let _ = writeln!(t, "{name:<7} {v:<30} {}", v.to_f64().unwrap_or(f64::NAN));
            };
            line("A", &p1.a);
            line("B1", &p2.b1);
            line("B2.re", &p2.b2.re);
            line("B3", &p2.b3);
            line("B4", &p2.b4);
            line("B5.re", &p2.b5.re);
            line("C_same", &p2.c_same);
            line("C_pair", &p2.c_pair);
            s.emit(&t)
        }
        _ => s.emit(&(serde_json::to_string_pretty(&json).map_err(Error::from)? + "\n")),
    }
}

fn cmd_bounds(args: &BoundsArgs, s: &Settings) -> CliResult<()> {
    let psi = match resolve_target(&args.case, &s.cfg)? {
        Target::Case(ScanCase {
            shape: crate::scan::CaseShape::State(psi),
            ..
        }) => psi,
        Target::Case(c) => PssState::basis(&basis_of(&c)?, c.d)?,
        Target::NoShape => return Err(usage("give --k, --diagram or --state")),
    };
    let defaults = TheoremHypothesis::default();
    let hyp = TheoremHypothesis {
        a_coefficient: args.a_coefficient.or(s.cfg.a_coefficient),
        d_min: args.d_min.or(s.cfg.d_min).unwrap_or(defaults.d_min),
        dilution: args.dilution.or(s.cfg.dilution).unwrap_or(defaults.dilution),
    };
    let report = theorem1_check(&psi, &hyp)?;
    let value = serde_json::to_value(&report).map_err(Error::from)?;
    match s.format.unwrap_or(Format::Table) {
        Format::Table => {
            let mut t = String::new();
            if let serde_json::Value::Object(map) = value {
                for (k, v) in map {
                    let _ = writeln!(t, "{k:<22} {v}");
                }
            }
            s.emit(&t)
        }
        _ => s.emit(&(serde_json::to_string_pretty(&value).map_err(Error::from)? + "\n")),
    }
}

fn dispatch(cli: &Cli) -> CliResult<()> {
    let settings = Settings::resolve(cli)?;
    let run = || match &cli.command {
        Command::Enumerate(a) => cmd_enumerate(a, &settings),
        Command::Fidelity(a) => cmd_fidelity(a, &settings),
        Command::Scan(a) => cmd_scan(a, &settings),
        Command::Verify(a) => cmd_verify(a, &settings),
        Command::Params(a) => cmd_params(a, &settings),
        Command::Bounds(a) => cmd_bounds(a, &settings),
    };
    match settings.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| usage(format!("--threads: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run() -> ExitCode {
    ExitCode::from(run_with(std::env::args_os()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_counts() {
        assert_eq!(parse_list("2,4,10..12").unwrap(), vec![2, 4, 10, 11, 12]);
        assert_eq!(parse_list("1..=3").unwrap(), vec![1, 2, 3]);
        assert!(parse_list("5..3").is_err());
        assert!(parse_list("x").is_err());
        assert_eq!(parse_count("1e5").unwrap(), 100_000);
        assert_eq!(parse_count("250").unwrap(), 250);
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("0.0").is_err());
    }

    #[test]
    fn method_selection() {
        assert_eq!(parse_methods("all").unwrap(), Method::ALL.to_vec());
        assert_eq!(parse_methods("closed,oracle,closed").unwrap(), vec![Method::ClosedForm, Method::Oracle]);
        assert!(parse_methods("guess").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(usage("x").exit_code(), 2);
        assert_eq!(CliError::Core(Error::Domain("x".into())).exit_code(), 2);
        let budget = Error::Budget { what: "state", needed: 10, limit: 1 };
        assert_eq!(CliError::Core(budget).exit_code(), 3);
        assert_eq!(CliError::VerifyFailed("c".into()).exit_code(), 4);
        assert_eq!(CliError::Core(Error::NoConvergence(3)).exit_code(), 1);
    }

    #[test]
    fn config_file_keys() {
        let cfg: FileConfig = toml::from_str("n = \"2..4\"\nd = 3\nmax-dense = \"1e5\"\ndiagram = [\"2,1\", \"1,1,1\"]\nthreads = 2\nformat = \"json\"\n").unwrap();
        assert_eq!(cfg.n.unwrap().text(), "2..4");
        assert_eq!(cfg.d.unwrap().text(), "3");
        assert_eq!(parse_count(&cfg.max_dense.unwrap().text()).unwrap(), 100_000);
        assert_eq!(cfg.diagram.map(|_| ()), Some(()));
        assert_eq!(cfg.format, Some(Format::Json));
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        let alias: FileConfig = toml::from_str("max_dense = 1000").unwrap();
        assert_eq!(alias.max_dense.unwrap().text(), "1000");
    }
}
