//! `bellbound`: local bounds of generic Bell functions from the command line.
//!
//! Exit codes: 0 success, 1 other failure, 2 unsupported parameter or usage
//! error, 3 search budget exceeded, 4 verification failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bellbound::bounds::{self, constraint_bound, scenario_trial_bound, Anchoring, BoundReport};
use bellbound::catalog::{self, check_sign_form, FunctionName, QuantumTarget, Reduction};
use bellbound::oracle::{brute_force_gbf, SearchOptions, SearchResult};
use bellbound::report::{round_sig, BoundReportJson, CatalogReportJson, ReductionJson};
use bellbound::scenario::{format_nu, parse_nu};
use bellbound::tolerance::{self, OUTPUT_SIG_DIGITS};
use bellbound::{BellScenario, Error, Nu, Scalar};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "bellbound", version, about = "Local-realistic bounds of generic multipartite Bell functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form bound, trial bound and reference values.
    Bound(BoundArgs),
    /// Exhaustive maximum over all deterministic assignments.
    Brute(BruteArgs),
    /// Generic form and local bound of a named two-outcome function.
    Catalog(CatalogArgs),
    /// Trial-to-quantum ratio for d = 2..dmax as CSV.
    Ratio(RatioArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Worker threads for exhaustive search [default: available parallelism]
    #[arg(long, env = "BELLBOUND_THREADS", value_parser = parse_threads)]
    threads: Option<usize>,
    /// Largest number of assignments an exhaustive search may scan.
    #[arg(long, default_value_t = tolerance::DEFAULT_BUDGET)]
    budget: u64,
    /// Witnesses reported.
    #[arg(long = "witnesses", default_value_t = tolerance::DEFAULT_WITNESS_CAP)]
    witness_cap: usize,
    /// Relative width of the argmax band.
    #[arg(long, default_value_t = tolerance::ARGMAX_REL, value_parser = parse_tolerance)]
    tolerance: f64,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            threads: self.threads,
            witness_cap: self.witness_cap,
            budget: self.budget,
            relative_tolerance: self.tolerance,
            fix_first_alpha: false,
        }
    }
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Phase; only 1/4 has a closed form.
    #[arg(long, default_value = "1/4", allow_hyphen_values = true)]
    nu: String,
    /// Named function instead of a phase (d is then 2).
    #[arg(long)]
    name: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Also run the exhaustive search.
    #[arg(long)]
    brute: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug)]
struct BruteArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, allow_hyphen_values = true)]
    nu: String,
    /// Report (√2)^k · G instead of G.
    #[arg(long = "sqrt2-power", default_value_t = 0, allow_hyphen_values = true)]
    sqrt2_power: i32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug)]
struct CatalogArgs {
    #[arg(long)]
    name: String,
    #[arg(long)]
    n: usize,
    /// Check the reduction on every assignment.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args, Debug)]
struct RatioArgs {
    #[arg(long)]
    dmax: usize,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(0) => Err("thread count must be at least 1".into()),
        Ok(t) => Ok(t),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        Ok(_) => Err("tolerance must be a positive number".into()),
        Err(e) => Err(e.to_string()),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_)
            | Error::UnsupportedPhase { .. }
            | Error::RepresentationInapplicable(_)
            | Error::UnknownName(_)
            | Error::Parse { .. } => 2,
            Error::BudgetExceeded { .. } => 3,
            Error::ReductionMismatch { .. } => 4,
            Error::NotFound(_) => 1,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: 1,
            message: format!("I/O: {e}"),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: 1,
            message: format!("CSV: {e}"),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: 1,
            message: format!("JSON: {e}"),
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bound(args) => cmd_bound(&args),
        Command::Brute(args) => cmd_brute(&args),
        Command::Catalog(args) => cmd_catalog(&args),
        Command::Ratio(args) => cmd_ratio(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Witness lines shown in text output.
const TEXT_WITNESSES: usize = 8;

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn emit_bound(report: &BoundReportJson, format: Format) -> CliResult {
    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(report)?)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "n",
                "d",
                "nu",
                "closed_form",
                "brute_force",
                "trial_bound",
                "quantum_reference",
                "ratio",
            ])?;
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                report.scenario.n.to_string(),
                report.scenario.d.to_string(),
                report.scenario.nu.clone(),
                opt(report.closed_form),
                opt(report.brute_force),
                report.trial_bound.to_string(),
                opt(report.quantum_reference),
                opt(report.ratio),
            ])?;
            w.flush()?;
        }
        Format::Text => {
            let s = &report.scenario;
            writeln!(out, "scenario           N={} d={} nu={}", s.n, s.d, s.nu)?;
            writeln!(out, "closed form        {}", fmt_opt(report.closed_form))?;
            writeln!(out, "brute force        {}", fmt_opt(report.brute_force))?;
            writeln!(out, "trial bound        {}", report.trial_bound)?;
            writeln!(out, "quantum reference  {}", fmt_opt(report.quantum_reference))?;
            if let Some(r) = report.ratio {
                writeln!(out, "ratio              {r}")?;
            }
            if let Some(n) = report.assignments_scanned {
                writeln!(out, "scanned            {n}")?;
            }
            if let Some(n) = report.argmax_count {
                writeln!(out, "argmax count       {n}")?;
            }
            for w in report.witnesses.iter().take(TEXT_WITNESSES) {
                writeln!(out, "witness            alpha={:?} beta={:?}", w.alpha, w.beta)?;
            }
            if report.witnesses.len() > TEXT_WITNESSES {
                writeln!(
                    out,
                    "                   ({} more; use --format json for all)",
                    report.witnesses.len() - TEXT_WITNESSES
                )?;
            }
            writeln!(out, "elapsed            {} ms", report.elapsed_ms)?;
        }
    }
    Ok(())
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn attach_search(report: &mut BoundReport<f64>, result: &SearchResult<f64>) {
    report.brute_force = Some(result.max_value);
    report.witnesses = result.argmax.clone();
}

fn cmd_bound(args: &BoundArgs) -> CliResult {
    let start = Instant::now();
    if let Some(name) = &args.name {
        let name: FunctionName = name.parse()?;
        let (json, _) = catalog_report(name, args.n, false, args.brute, &args.search.options())?;
        let mut bound = json.bound;
        bound.elapsed_ms = elapsed_ms(start);
        return emit_bound(&bound, args.format);
    }
    let nu = parse_nu(&args.nu)?;
    if nu != Nu::new(1, 4) {
        return Err(Failure {
            code: 2,
            message: format!(
                "no closed form for nu = {}; the closed form covers nu = 1/4 only, use `bellbound brute` for other phases",
                format_nu(nu)
            ),
        });
    }
    let mut report = BoundReport::<f64>::quarter(args.n, args.d)?;
    let mut search = None;
    if args.brute {
        let r = brute_force_gbf(&report.scenario, 1.0, &args.search.options())?;
        attach_search(&mut report, &r);
        search = Some(r);
    }
    let mut json = BoundReportJson::from_report(&report, elapsed_ms(start));
    if let Some(r) = &search {
        json = json.with_search(r);
    }
    emit_bound(&json, args.format)
}

fn cmd_brute(args: &BruteArgs) -> CliResult {
    let start = Instant::now();
    let nu = parse_nu(&args.nu)?;
    let s = BellScenario::new(args.n, args.d, nu)?;
    let scale = f64::sqrt2_pow(args.sqrt2_power);
    let result = brute_force_gbf(&s, scale, &args.search.options())?;
    let closed_form = if s.has_odd_arguments() {
        Some(constraint_bound::<f64>(args.n, args.d, nu, Anchoring::Below)?.value * scale)
    } else {
        None
    };
    let mut report = BoundReport {
        scenario: s,
        closed_form,
        brute_force: None,
        witnesses: Vec::new(),
        quantum_reference: Some(scale * catalog::quantum_reference::<f64>(QuantumTarget::Scenario(s))?),
        trial_bound: scale * scenario_trial_bound::<f64>(&s),
    };
    attach_search(&mut report, &result);
    let json = BoundReportJson::from_report(&report, elapsed_ms(start)).with_search(&result);
    emit_bound(&json, args.format)
}

fn catalog_report(
    name: FunctionName,
    n: usize,
    verify: bool,
    brute: bool,
    opts: &SearchOptions,
) -> CliResult<(CatalogReportJson, Option<Reduction<f64>>)> {
    let (nu, k) = catalog::table_reduction(name, n)?;
    let scenario = BellScenario::new(n, 2, nu)?;
    let scale = f64::sqrt2_pow(k);
    let reduction = if verify {
        Some(catalog::reduce_to_gbf::<f64>(name, n)?)
    } else {
        None
    };
    let sign = if verify { Some(check_sign_form::<f64>(name, n)?) } else { None };
    let closed_form = if scenario.has_odd_arguments() {
        Some(constraint_bound::<f64>(n, 2, nu, Anchoring::Below)?.value * scale)
    } else {
        None
    };
    let quantum_reference = match name {
        FunctionName::Chsh => Some(catalog::quantum_reference::<f64>(QuantumTarget::Named(name))?),
        _ => None,
    };
    let mut report = BoundReport {
        scenario,
        closed_form,
        brute_force: None,
        witnesses: Vec::new(),
        quantum_reference,
        trial_bound: scale * scenario_trial_bound::<f64>(&scenario),
    };
    let search = if brute {
        let r = catalog::local_bound::<f64>(name, n, opts)?;
        attach_search(&mut report, &r);
        Some(r)
    } else {
        None
    };
    let mut bound = BoundReportJson::from_report(&report, 0);
    if let Some(r) = &search {
        bound = bound.with_search(r);
    }
    let reduction_json = match &reduction {
        Some(r) => ReductionJson::from_reduction(r, sign.as_ref()),
        None => ReductionJson {
            name: name.to_string(),
            n,
            nu: format_nu(nu),
            sqrt2_power: k,
            scale: round_sig(scale, OUTPUT_SIG_DIGITS),
            verified: false,
            max_error: 0.0,
            sign_form_exact: None,
            sign_form_proportional: None,
        },
    };
    Ok((
        CatalogReportJson {
            reduction: reduction_json,
            bound,
        },
        reduction,
    ))
}

fn cmd_catalog(args: &CatalogArgs) -> CliResult {
    let start = Instant::now();
    let name: FunctionName = args.name.parse()?;
    let (mut json, _) = catalog_report(name, args.n, args.verify, true, &args.search.options())?;
    json.bound.elapsed_ms = elapsed_ms(start);
    let mut out = io::stdout().lock();
    match args.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&json)?)?,
        Format::Csv => {
            let r = &json.reduction;
            let b = &json.bound;
            let mut w = csv_writer(out);
            w.write_record(["name", "n", "nu", "sqrt2_power", "scale", "verified", "closed_form", "brute_force"])?;
            let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            w.write_record([
                r.name.clone(),
                r.n.to_string(),
                r.nu.clone(),
                r.sqrt2_power.to_string(),
                r.scale.to_string(),
                r.verified.to_string(),
                opt(b.closed_form),
                opt(b.brute_force),
            ])?;
            w.flush()?;
        }
        Format::Text => {
            let r = &json.reduction;
            writeln!(out, "function           {} (N={})", r.name, r.n)?;
            writeln!(out, "generic form       (sqrt 2)^{} G^{{{}}}_{}", r.sqrt2_power, r.nu, r.n)?;
            writeln!(out, "scale              {}", r.scale)?;
            writeln!(
                out,
                "verified           {}",
                if r.verified { "yes, on every assignment" } else { "not checked (use --verify)" }
            )?;
            if let Some(exact) = r.sign_form_exact {
                writeln!(out, "sign form exact    {exact}")?;
            }
            drop(out);
            emit_bound(&json.bound, Format::Text)?;
        }
    }
    Ok(())
}

fn cmd_ratio(args: &RatioArgs) -> CliResult {
    if args.dmax < 2 {
        return Err(Failure {
            code: 2,
            message: format!("--dmax must be at least 2, got {}", args.dmax),
        });
    }
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
        None => Box::new(io::BufWriter::new(io::stdout().lock())),
    };
    let mut w = csv_writer(sink);
    w.write_record(["d", "trial_bound", "ratio"])?;
    for d in 2..=args.dmax {
        let trial: f64 = bounds::trial_bound(d)?;
        let ratio = trial / (d - 1) as f64;
        w.write_record([
            d.to_string(),
            round_sig(trial, OUTPUT_SIG_DIGITS).to_string(),
            round_sig(ratio, OUTPUT_SIG_DIGITS).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
