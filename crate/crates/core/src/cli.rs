//! The `sepfid` command line.
//!
//! Exit codes: 0 success, 2 parse or usage error, 3 invariant violation,
//! 4 incompatible dimensions, 5 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{bound_report, BoundReport, DistinguishableSubset, ReportOptions};
use crate::catalog::{canonical_name, lookup, verification_suite, CatalogEntry, CatalogParams, ENTRIES};
use crate::ensemble::Ensemble;
use crate::error::Error;
use crate::fidelity::{evaluate_strategy, success_probability};
use crate::io::{self, LoadError, SearchDoc, StrategyDoc};
use crate::measurement::{require_complete, DecodingMap, Povm, SeparablePovm, Strategy};
use crate::search::{certify, Objective, SearchConfig};
use crate::tolerance::{set_profile, Profile};
use crate::verify::{verify_entry, VerifyRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_DIMS: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

/// Environment variable selecting the tolerance profile.
pub const TOLERANCE_ENV: &str = "SEPFID_TOLERANCE";

#[derive(Debug, Parser)]
#[command(name = "sepfid", version, about = "Distinguishability of pure-state ensembles under separable measurements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// All applicable bounds per bipartition and the resulting sandwiches.
    Bounds(BoundsArgs),
    /// Fidelity and success probability of a given measurement.
    Evaluate(EvaluateArgs),
    /// Numerical search for a good product-basis measurement.
    Certify(CertifyArgs),
    /// List catalog entries, show one, or export it.
    Catalog(CatalogArgs),
    /// Check catalog entries against their known values.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Fidelity,
    Success,
}

#[derive(Debug, Args)]
struct Params {
    /// Probabilities, comma separated.
    #[arg(long, value_delimiter = ',')]
    probs: Option<Vec<f64>>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    /// Number of states.
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
}

impl Params {
    fn catalog(&self) -> CatalogParams {
        CatalogParams {
            probs: self.probs.clone(),
            alpha: self.alpha,
            d: self.d,
            n: self.n,
            k: self.k,
            p: self.p,
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Ensemble file.
    #[arg(long)]
    ensemble: Option<PathBuf>,
    /// Catalog entry name.
    #[arg(long)]
    catalog: Option<String>,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: Params,
    /// Extra declared subsets, e.g. "0,1;2,3".
    #[arg(long)]
    subsets: Option<String>,
    /// Only subsets with a verified certificate.
    #[arg(long)]
    strict: bool,
    /// Do not add automatically found subsets.
    #[arg(long)]
    no_default_subsets: bool,
    /// Only list bounds at this cut (global bounds are always listed).
    #[arg(long)]
    cut: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: Params,
    /// Measurement file; defaults to the catalog entry's strategies.
    #[arg(long)]
    measurement: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: Source,
    #[command(flatten)]
    params: Params,
    #[arg(long, value_enum, default_value = "fidelity")]
    objective: ObjectiveArg,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 50)]
    sweeps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rotation angles, comma separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    steps: Option<Vec<f64>>,
    /// Write the best measurement and decoding to this file.
    #[arg(long)]
    export: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Debug, Args)]
struct CatalogArgs {
    name: Option<String>,
    #[command(flatten)]
    params: Params,
    #[arg(long)]
    export_ensemble: Option<PathBuf>,
    /// Writes the entry's first strategy.
    #[arg(long)]
    export_measurement: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// `all` or an entry name.
    #[arg(default_value = "all")]
    scope: String,
    #[command(flatten)]
    params: Params,
    /// Skip the search rows.
    #[arg(long)]
    no_search: bool,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch(..) => EXIT_DIMS,
            _ => EXIT_INVARIANT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Invalid(inner) => inner.into(),
            other => Failure {
                code: EXIT_PARSE,
                message: other.to_string(),
            },
        }
    }
}

fn usage(message: String) -> Failure {
    Failure {
        code: EXIT_PARSE,
        message,
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    usage(format!("output error: {e}"))
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs one command line; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    if let Ok(v) = std::env::var(TOLERANCE_ENV) {
        match v.parse::<Profile>() {
            Ok(p) => set_profile(p),
            Err(m) => {
                let _ = writeln!(err, "error: {TOLERANCE_ENV}: {m}");
                return EXIT_PARSE;
            }
        }
    }
    let result = match cli.command {
        Command::Bounds(a) => cmd_bounds(&a, out),
        Command::Evaluate(a) => cmd_evaluate(&a, out),
        Command::Certify(a) => cmd_certify(&a, out),
        Command::Catalog(a) => cmd_catalog(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn catalog_entry(name: &str, params: &Params) -> std::result::Result<CatalogEntry, Failure> {
    if canonical_name(name).is_none() {
        return Err(usage(format!("unknown catalog entry '{name}'; run `sepfid catalog` for the list")));
    }
    Ok(lookup(name, &params.catalog())?)
}

/// The ensemble plus, for catalog entries, the entry itself.
fn load_source(source: &Source, params: &Params) -> std::result::Result<(Ensemble, Option<CatalogEntry>), Failure> {
    match (&source.ensemble, &source.catalog) {
        (Some(path), _) => Ok((io::load_ensemble(path)?, None)),
        (None, Some(name)) => {
            let entry = catalog_entry(name, params)?;
            Ok((entry.ensemble.clone(), Some(entry)))
        }
        (None, None) => Err(usage("one of --ensemble or --catalog is required".into())),
    }
}

fn parse_subsets(text: &str) -> std::result::Result<Vec<DistinguishableSubset>, Failure> {
    text.split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|g| {
            g.split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| usage(format!("--subsets: '{x}': {e}"))))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(DistinguishableSubset::declared)
        })
        .collect()
}

/// `x` to 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let r: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    format!("{r}")
}

fn write_report_table(r: &BoundReport, cut: Option<&str>, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "dims {:?}, {} states, orthogonal: {}, equiprobable: {}, span rank: {}", r.dims, r.states, r.orthogonal, r.equiprobable, r.span_rank)?;
    for c in &r.cuts {
        let lambdas: Vec<String> = c.lambdas.iter().map(|&l| sig6(l)).collect();
        writeln!(out, "cut {}: dims {:?}, effective {:?}, lambda [{}]", c.cut, c.nominal, c.effective, lambdas.join(", "))?;
    }
    writeln!(out)?;
    writeln!(out, "{:<44} {:<19} {:<6} {:<10} {:>10} {:>10} {:<8}", "bound", "quantity", "side", "cut", "raw", "capped", "mode")?;
    for b in &r.bounds {
        let label = b.cut.as_ref().map(|c| c.label());
        if let (Some(want), Some(have)) = (cut, &label) {
            if want != have {
                continue;
            }
        }
        let name = match &b.detail {
            Some(d) => format!("{}[{}]", b.kind.name(), d),
            None => b.kind.name().to_string(),
        };
        writeln!(
            out,
            "{:<44} {:<19} {:<6} {:<10} {:>10} {:>10} {:<8}",
            name,
            b.quantity.name(),
            b.side.name(),
            label.as_deref().unwrap_or(b.scope.name()),
            sig6(b.raw),
            sig6(b.capped),
            b.mode.map_or("-", |m| m.name()),
        )?;
    }
    for s in &r.skipped {
        if let (Some(want), Some(have)) = (cut, s.cut.as_ref().map(|c| c.label())) {
            if want != have {
                continue;
            }
        }
        let at = s.cut.as_ref().map(|c| format!("@{c}")).unwrap_or_default();
        writeln!(out, "skipped {}{}: {}", s.name, at, s.reason)?;
    }
    writeln!(out)?;
    for (label, s) in [("F_S", &r.fidelity), ("P_s", &r.success)] {
        write!(out, "{label}: {} <= {label} <= {}  (lower {}, upper {})", sig6(s.lower), sig6(s.upper), s.lower_source, s.upper_source)?;
        if s.determined {
            write!(out, "  {label} determined = {}", sig6(s.lower))?;
        }
        writeln!(out)?;
    }
    for w in &r.warnings {
        writeln!(out, "warning: {w}")?;
    }
    Ok(())
}

fn cmd_bounds(a: &BoundsArgs, out: &mut dyn Write) -> Outcome {
    let (ensemble, entry) = load_source(&a.source, &a.params)?;
    let mut opts = entry.as_ref().map(CatalogEntry::report_options).unwrap_or_default();
    if a.strict {
        // Declared catalog subsets are dropped; declared ones given on the
        // command line are rejected by the report.
        opts.subsets.retain(DistinguishableSubset::is_certified);
    }
    if let Some(text) = &a.subsets {
        opts.subsets.extend(parse_subsets(text)?);
    }
    opts.strict = a.strict;
    opts.use_default_subsets = !a.no_default_subsets;
    if let Some(c) = &a.cut {
        crate::ensemble::Bipartition::parse(c, ensemble.dims())?;
    }
    let report = bound_report(&ensemble, &opts)?;
    match a.format {
        Format::Json => out.write_all(io::report_to_json(&report).as_bytes()).map_err(io_failure)?,
        Format::Table => {
            let cut = a
                .cut
                .as_ref()
                .map(|c| crate::ensemble::Bipartition::parse(c, ensemble.dims()).map(|b| b.normalized().label()))
                .transpose()?;
            write_report_table(&report, cut.as_deref(), out).map_err(io_failure)?
        }
    }
    Ok(EXIT_OK)
}

fn evaluate_one(s: &Ensemble, m: &SeparablePovm, g: Option<&DecodingMap>) -> std::result::Result<StrategyDoc, Failure> {
    if s.dims() != m.dims() {
        return Err(Error::DimensionMismatch(s.dims().to_vec(), m.dims().to_vec()).into());
    }
    require_complete(m)?;
    if let Some(g) = g {
        g.check_against(s, m)?;
    }
    let rep = evaluate_strategy(s, m, g)?;
    let ml = success_probability(s, m, None)?;
    Ok(StrategyDoc::new(&rep, g.is_some(), ml))
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Outcome {
    let (ensemble, entry) = load_source(&a.source, &a.params)?;
    let strategies: Vec<Strategy> = match (&a.measurement, entry) {
        (Some(path), _) => {
            let (povm, decoding) = io::load_measurement(path)?;
            vec![Strategy {
                name: path.display().to_string(),
                povm,
                decoding,
            }]
        }
        (None, Some(e)) => e.strategies,
        (None, None) => return Err(usage("--measurement is required with --ensemble".into())),
    };
    let mut docs = Vec::new();
    for st in &strategies {
        docs.push((st.name.clone(), evaluate_one(&ensemble, &st.povm, st.decoding.as_ref())?));
    }
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        match a.format {
            Format::Json => {
                let list: Vec<serde_json::Value> = docs
                    .iter()
                    .map(|(n, d)| serde_json::json!({"name": n, "report": d}))
                    .collect();
                out.write_all(io::to_json(&list).as_bytes())
            }
            Format::Table => {
                for (name, d) in &docs {
                    writeln!(out, "strategy {name}")?;
                    if let Some(f) = d.average_fidelity {
                        writeln!(out, "  average fidelity F(M,G)   {}", sig6(f))?;
                    }
                    writeln!(out, "  achievable fidelity F(M)  {}", sig6(d.achievable_fidelity))?;
                    if let Some(p) = d.success_probability {
                        writeln!(out, "  success probability P_s   {}", sig6(p))?;
                    }
                    writeln!(out, "  ML success probability    {}", sig6(d.ml_success_probability))?;
                    for o in &d.outcomes {
                        writeln!(out, "  outcome {:>3}: contribution {}", o.outcome, sig6(o.contribution))?;
                    }
                }
                Ok(())
            }
        }
    };
    w(out).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write) -> Outcome {
    let (ensemble, entry) = load_source(&a.source, &a.params)?;
    let mut cfg = SearchConfig {
        restarts: a.restarts,
        sweeps: a.sweeps,
        seed: a.seed,
        objective: match a.objective {
            ObjectiveArg::Fidelity => Objective::Fidelity,
            ObjectiveArg::Success => Objective::Success,
        },
        ..SearchConfig::default()
    };
    if let Some(steps) = &a.steps {
        cfg.steps = steps.clone();
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let seeds: Vec<SeparablePovm> = entry
        .as_ref()
        .map(|e| e.strategies.iter().map(|s| s.povm.clone()).collect())
        .unwrap_or_default();
    let result = certify(&ensemble, &cfg, &seeds)?;
    let report = bound_report(&ensemble, &ReportOptions::default())?;
    let upper = match cfg.objective {
        Objective::Fidelity => &report.fidelity,
        Objective::Success => &report.success,
    };
    if let Some(path) = &a.export {
        std::fs::write(path, io::measurement_to_json(&result.best_measurement, Some(&result.best_decoding)))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        match a.format {
            Format::Json => {
                let doc = serde_json::json!({
                    "search": SearchDoc::from(&result),
                    "upper": io::round12(upper.upper),
                    "upper_source": upper.upper_source,
                    "gap": io::round12(upper.upper - result.best_value),
                });
                out.write_all(io::to_json(&doc).as_bytes())
            }
            Format::Table => {
                writeln!(out, "objective      {}", cfg.objective.name())?;
                writeln!(out, "best value     {}", sig6(result.best_value))?;
                writeln!(out, "best restart   {} of {}", result.best_restart, result.trace.len())?;
                writeln!(out, "upper bound    {} ({})", sig6(upper.upper), upper.upper_source)?;
                writeln!(out, "gap            {}", sig6(upper.upper - result.best_value))
            }
        }
    };
    w(out).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn cmd_catalog(a: &CatalogArgs, out: &mut dyn Write) -> Outcome {
    let Some(name) = &a.name else {
        for (name, alias, params, description) in ENTRIES {
            let alias = if alias.is_empty() { String::new() } else { format!(" ({alias})") };
            writeln!(out, "{:<30} {:<40} {}", format!("{name}{alias}"), description, params).map_err(io_failure)?;
        }
        return Ok(EXIT_OK);
    };
    let entry = catalog_entry(name, &a.params)?;
    if let Some(path) = &a.export_ensemble {
        std::fs::write(path, io::ensemble_to_json(&entry.ensemble))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    if let Some(path) = &a.export_measurement {
        let st = entry.strategies.first().ok_or_else(|| usage("entry has no strategy".into()))?;
        std::fs::write(path, io::measurement_to_json(&st.povm, st.decoding.as_ref()))
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "{}: {}", entry.name, entry.description)?;
        writeln!(out, "dims {:?}, probabilities {:?}", entry.ensemble.dims(), entry.ensemble.probs())?;
        for k in &entry.known {
            writeln!(out, "known {} = {} = {}", k.quantity.name(), k.expression, sig6(k.value))?;
        }
        for s in &entry.strategies {
            writeln!(out, "strategy {}", s.name)?;
        }
        Ok(())
    };
    w(out).map_err(io_failure)?;
    Ok(EXIT_OK)
}

fn write_verify_table(rows: &[VerifyRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{:<18} {:<19} {:<14} {:<48} {:>10} {:>10} {:>9} result", "entry", "quantity", "expected", "source", "computed", "expected", "|delta|")?;
    for r in rows {
        writeln!(
            out,
            "{:<18} {:<19} {:<14} {:<48} {:>10} {:>10} {:>9.1e} {}",
            r.entry,
            r.quantity,
            r.expression,
            r.source,
            sig6(r.computed),
            sig6(r.expected),
            r.delta,
            if r.pass { "PASS" } else { "FAIL" }
        )?;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    writeln!(out, "{} rows, {} failed", rows.len(), failed)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Outcome {
    let entries = if a.scope == "all" {
        verification_suite()
    } else {
        vec![catalog_entry(&a.scope, &a.params)?]
    };
    let cfg = SearchConfig {
        restarts: a.restarts,
        ..SearchConfig::default()
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let mut rows = Vec::new();
    for e in &entries {
        rows.extend(verify_entry(e, (!a.no_search).then_some(&cfg))?);
    }
    match a.format {
        Format::Json => out.write_all(io::to_json(&rows).as_bytes()).map_err(io_failure)?,
        Format::Table => write_verify_table(&rows, out).map_err(io_failure)?,
    }
    Ok(if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_VERIFY })
}
