//! The `sumset` command line.
//!
//! Exit codes: 0 success, 1 a verification or certification failure,
//! 2 usage, configuration, parse or I/O errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::arith::{format_ratio, parse_integer, rational_sqrt, Integer, Ratio};
use crate::construct::{canonicalize, verify_pair, SolutionPair, VerifyReport};
use crate::error::{Error, Result};
use crate::family::{certify, generate, FamilyId, SumStatus};
use crate::io::{matrix_to_json, pair_to_json, parse_matrix, parse_pair, verify_report_to_json, SCHEMA};
use crate::matrix::{
    build_quad44_triple, build_thm35_pair, check_matrix, condition_failures, euler_matrix, Condition, MatrixReport,
    Quad44Variant, SquareMatrix3,
};
use crate::search::{cross_validate, find_solutions, search_to_jsonl, SearchConfig};

pub const THREADS_ENV: &str = "SUMSET_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sumset", version, about = "Sets A, B whose pairwise sums are all perfect squares")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write data here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Extra diagnostics on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// Family name, e.g. triple33_v3 or quad44_b.
    #[arg(long)]
    family: String,

    /// Comma-separated integer parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    params: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a parametric family.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Reduce the result to canonical form.
        #[arg(long)]
        canonical: bool,
        /// Print every sum together with its square root.
        #[arg(long)]
        show_witnesses: bool,
    },
    /// Check that every sum of a pair file is a square.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Reduce a verified pair file to canonical form.
    Canonicalize {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Certify a family symbolically: every sum is the square of a polynomial.
    Prove {
        #[arg(long)]
        family: String,
    },
    /// Build or check semi-magic matrices of squares.
    Matrices {
        #[command(subcommand)]
        action: MatrixAction,
    },
    /// Enumerate canonical solutions of a shape up to a bound.
    Search {
        #[command(flatten)]
        search: SearchArgs,
        /// Continue an interrupted run recorded next to --output.
        #[arg(long, requires = "output")]
        resume: bool,
    },
    /// Check that the search rediscovers a family member.
    CrossValidate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Largest element value to search.
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Shape as m,n.
    #[arg(long, value_parser = parse_shape)]
    shape: (usize, usize),
    /// Largest element value.
    #[arg(long)]
    bound: u64,
    /// Stop after this many solutions (in output order).
    #[arg(long)]
    max_results: Option<usize>,
    /// Worker threads; the SUMSET_THREADS environment variable takes precedence.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum MatrixAction {
    /// Construct matrices from parameters.
    Build {
        #[arg(value_enum)]
        kind: BuildKind,
        /// Comma-separated integer parameters.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        params: Vec<String>,
        /// Root choice for quad44-triple.
        #[arg(long, value_enum, default_value_t = Variant::B)]
        variant: Variant,
    },
    /// Report on a matrix file, optionally checking a condition against a second one.
    Check {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, requires = "condition")]
        against: Option<PathBuf>,
        /// relef, releg, releh or relgh.
        #[arg(long, requires = "against")]
        condition: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BuildKind {
    Euler,
    Thm35Pair,
    Quad44Triple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Variant {
    B,
    C,
}

/// Where data goes, resolved and validated before any work starts.
struct RunConfig {
    format: Format,
    output: Option<PathBuf>,
    verbose: u8,
}

struct Outcome {
    data: String,
    ok: bool,
}

impl Outcome {
    fn ok(data: String) -> Self {
        Outcome { data, ok: true }
    }
}

pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{rendered}");
                0
            } else {
                let _ = write!(err, "{rendered}");
                2
            };
        }
    };
    let cfg = RunConfig { format: cli.format, output: cli.output, verbose: cli.verbose };
    match dispatch(cli.command, &cfg, err) {
        Ok(outcome) => {
            if let Err(e) = emit(&cfg, &outcome.data, out) {
                let _ = writeln!(err, "error: {e}");
                return 2;
            }
            i32::from(!outcome.ok)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::NotAPolynomialSquare => 1,
                _ => 2,
            }
        }
    }
}

fn emit(cfg: &RunConfig, data: &str, out: &mut dyn Write) -> Result<()> {
    if data.is_empty() {
        return Ok(());
    }
    let mut text = data.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cfg.output {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

fn parse_params(raw: &[String]) -> Result<Vec<Integer>> {
    raw.iter().map(|s| parse_integer(s)).collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn dispatch(cmd: Command, cfg: &RunConfig, err: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::Generate { family, canonical, show_witnesses } => cmd_generate(cfg, &family, canonical, show_witnesses),
        Command::Verify { input } => cmd_verify(cfg, &input),
        Command::Canonicalize { input } => cmd_canonicalize(cfg, &input),
        Command::Prove { family } => cmd_prove(cfg, &family),
        Command::Matrices { action } => match action {
            MatrixAction::Build { kind, params, variant } => cmd_build(cfg, kind, &params, variant),
            MatrixAction::Check { input, against, condition } => cmd_check(cfg, &input, against.as_deref(), condition.as_deref()),
        },
        Command::Search { search, resume } => cmd_search(cfg, &search, resume, err),
        Command::CrossValidate { family, bound } => cmd_cross_validate(cfg, &family, bound),
    }
}

fn pair_text(p: &SolutionPair) -> String {
    p.to_string()
}

fn witness(sum: &Ratio) -> Option<String> {
    rational_sqrt(sum).map(|r| format_ratio(&r))
}

fn cmd_generate(cfg: &RunConfig, args: &FamilyArgs, canonical: bool, show_witnesses: bool) -> Result<Outcome> {
    let id: FamilyId = args.family.parse()?;
    let params = parse_params(&args.params)?;
    let out = generate(id, &params)?;
    if canonical {
        let r = verify_pair(&out.pair);
        if !r.ok {
            return Ok(Outcome { data: render_verify(cfg, &out.pair, &r), ok: false });
        }
    }
    let pair = if canonical { canonicalize(&out.pair)? } else { out.pair.clone() };
    let sums: Vec<(usize, usize, Ratio)> = (0..pair.a.len())
        .flat_map(|i| (0..pair.b.len()).map(move |j| (i, j)))
        .map(|(i, j)| (i + 1, j + 1, &pair.a[i] + &pair.b[j]))
        .collect();
    let data = match cfg.format {
        Format::Json => {
            let mut v = pair_to_json(&pair);
            v["family"] = json!(id.name());
            v["params"] = json!(params.iter().map(ToString::to_string).collect::<Vec<_>>());
            v["degenerate"] = json!(out.degenerate);
            if show_witnesses {
                v["witnesses"] = sums
                    .iter()
                    .map(|(i, j, s)| json!({"i": i, "j": j, "sum": format_ratio(s), "root": witness(s)}))
                    .collect();
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = pair_text(&pair);
            if out.degenerate {
                s.push_str("\n(degenerate: repeated elements)");
            }
            if show_witnesses {
                for (i, j, sum) in &sums {
                    let root = witness(sum).map_or("not a square".to_string(), |r| format!("({r})^2"));
                    s.push_str(&format!("\na{i} + b{j} = {} = {root}", format_ratio(sum)));
                }
            }
            s
        }
    };
    Ok(Outcome::ok(data))
}

fn render_verify(cfg: &RunConfig, p: &SolutionPair, r: &VerifyReport) -> String {
    match cfg.format {
        Format::Json => pretty(&verify_report_to_json(p, r)),
        Format::Text => {
            let (m, n) = p.shape();
            let mut s = format!("{}/{} sums square", m * n - r.failures.len(), m * n);
            for (i, j, sum) in &r.failures {
                s.push_str(&format!("\na{i} + b{j} = {} is not a square", format_ratio(sum)));
            }
            if r.duplicate_a {
                s.push_str("\nA has repeated elements");
            }
            if r.duplicate_b {
                s.push_str("\nB has repeated elements");
            }
            s
        }
    }
}

fn cmd_verify(cfg: &RunConfig, input: &Path) -> Result<Outcome> {
    let p = parse_pair(&read(input)?)?;
    let r = verify_pair(&p);
    Ok(Outcome { data: render_verify(cfg, &p, &r), ok: r.ok })
}

fn cmd_canonicalize(cfg: &RunConfig, input: &Path) -> Result<Outcome> {
    let p = parse_pair(&read(input)?)?;
    let r = verify_pair(&p);
    if !r.ok {
        return Ok(Outcome { data: render_verify(cfg, &p, &r), ok: false });
    }
    let c = canonicalize(&p)?;
    let data = match cfg.format {
        Format::Json => pretty(&pair_to_json(&c)),
        Format::Text => pair_text(&c),
    };
    Ok(Outcome::ok(data))
}

fn cmd_prove(cfg: &RunConfig, family: &str) -> Result<Outcome> {
    let id: FamilyId = family.parse()?;
    let cert = certify(id);
    let total = cert.sums.len();
    let exempt = cert.sums.iter().filter(|s| matches!(s.status, SumStatus::Exempt)).count();
    let certified = cert.certified_count();
    let data = match cfg.format {
        Format::Json => {
            let sums: Vec<Value> = cert
                .sums
                .iter()
                .map(|s| {
                    let (status, root) = match &s.status {
                        SumStatus::Square(r) => ("square", Some(r.to_string())),
                        SumStatus::Exempt => ("exempt", None),
                        SumStatus::NotSquare => ("not_square", None),
                    };
                    json!({"label": s.label(), "sum": s.sum.to_string(), "status": status, "root": root})
                })
                .collect();
            pretty(&json!({
                "schema": SCHEMA,
                "family": id.name(),
                "certified": certified,
                "exempt": exempt,
                "total": total,
                "complete": cert.is_complete(),
                "denominator_root": cert.denominator_root.as_ref().map(ToString::to_string),
                "sums": sums,
            }))
        }
        Format::Text => {
            let mut s = format!("{id}: {certified}/{} sums certified", total - exempt);
            if exempt > 0 {
                s.push_str(&format!(" ({exempt} exempt)"));
            }
            match &cert.denominator_root {
                Some(d) if !d.is_zero() && d.to_string() != "1" => s.push_str(&format!("\ndenominator = ({d})^2")),
                Some(_) => {}
                None => s.push_str("\ndenominator is not a square"),
            }
            for p in &cert.sums {
                let tail = match &p.status {
                    SumStatus::Square(r) => format!("({r})^2"),
                    SumStatus::Exempt => "exempt".to_string(),
                    SumStatus::NotSquare => "NOT A SQUARE".to_string(),
                };
                s.push_str(&format!("\n{} = {}\n    = {tail}", p.label(), p.sum));
            }
            s
        }
    };
    Ok(Outcome { data, ok: cert.is_complete() })
}

fn report_json(r: &MatrixReport) -> Value {
    serde_json::to_value(r).expect("report serializes")
}

fn matrix_text(name: &str, m: &SquareMatrix3) -> String {
    let r = check_matrix(m);
    let sum = r.magic_sum.as_ref().map_or("none".to_string(), format_ratio);
    format!("{name} =\n{m}magic sum {sum}, semi-magic {}, squares {}", r.semi_magic, r.all_entries_square)
}

fn expect_arity(kind: &str, params: &[Integer], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::Domain(format!("{kind} takes {n} parameters, got {}", params.len())));
    }
    Ok(())
}

fn cmd_build(cfg: &RunConfig, kind: BuildKind, raw: &[String], variant: Variant) -> Result<Outcome> {
    let params = parse_params(raw)?;
    let mut extra = serde_json::Map::new();
    let named: Vec<(&str, SquareMatrix3)> = match kind {
        BuildKind::Euler => {
            expect_arity("euler", &params, 4)?;
            vec![("E", euler_matrix(&params[0], &params[1], &params[2], &params[3]))]
        }
        BuildKind::Thm35Pair => {
            expect_arity("thm35-pair", &params, 7)?;
            let p = &params;
            let (e, f) = build_thm35_pair(&p[0], &p[1], &p[2], &p[3], &p[4], &p[5], &p[6]);
            vec![("E", e), ("F", f)]
        }
        BuildKind::Quad44Triple => {
            expect_arity("quad44-triple", &params, 3)?;
            let v = match variant {
                Variant::B => Quad44Variant::B,
                Variant::C => Quad44Variant::C,
            };
            let tr = build_quad44_triple(&params[0], &params[1], &params[2], v)?;
            extra.insert("t".into(), json!(format_ratio(&tr.t)));
            extra.insert("n".into(), json!(format_ratio(&tr.n)));
            extra.insert("pqrs".into(), json!(tr.pqrs.iter().map(ToString::to_string).collect::<Vec<_>>()));
            vec![("E", tr.e), ("G", tr.g), ("H", tr.h)]
        }
    };
    let data = match cfg.format {
        Format::Json => {
            let mut v = json!({
                "schema": SCHEMA,
                "kind": format!("{kind:?}"),
                "params": params.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            v["matrices"] = named.iter().map(|(n, m)| (n.to_string(), matrix_to_json(m))).collect();
            v["reports"] = named.iter().map(|(n, m)| (n.to_string(), report_json(&check_matrix(m)))).collect();
            for (k, val) in extra {
                v[k] = val;
            }
            pretty(&v)
        }
        Format::Text => named.iter().map(|(n, m)| matrix_text(n, m)).collect::<Vec<_>>().join("\n\n"),
    };
    let ok = named.iter().all(|(_, m)| check_matrix(m).is_valid());
    Ok(Outcome { data, ok })
}

fn cmd_check(cfg: &RunConfig, input: &Path, against: Option<&Path>, condition: Option<&str>) -> Result<Outcome> {
    let first = parse_matrix(&read(input)?)?;
    let report = check_matrix(&first);
    let mut ok = report.is_valid();
    let mut cond_json = Value::Null;
    let mut cond_text = String::new();
    if let (Some(path), Some(name)) = (against, condition) {
        let cond = Condition::from_name(name)
            .ok_or_else(|| Error::Parse(format!("unknown condition `{name}` (expected relef, releg, releh or relgh)")))?;
        let second = parse_matrix(&read(path)?)?;
        let failed = condition_failures(cond, &first, &second);
        ok &= failed.is_empty();
        let cells: Vec<Value> = failed.iter().map(|(a, b)| json!([[a.0, a.1], [b.0, b.1]])).collect();
        cond_json = json!({"name": cond.name(), "holds": failed.is_empty(), "failed_cells": cells});
        cond_text = format!("\n{cond}: {}", if failed.is_empty() { "holds" } else { "fails" });
        for ((r1, c1), (r2, c2)) in &failed {
            cond_text.push_str(&format!("\n  cell ({r1},{c1}) != cell ({r2},{c2})"));
        }
    }
    let data = match cfg.format {
        Format::Json => {
            let mut v = json!({"schema": SCHEMA, "report": report_json(&report)});
            if !cond_json.is_null() {
                v["condition"] = cond_json;
            }
            pretty(&v)
        }
        Format::Text => {
            let mut s = matrix_text("M", &first);
            if !report.failing_cells.is_empty() {
                s.push_str(&format!("\nnon-square cells: {:?}", report.failing_cells));
            }
            s + &cond_text
        }
    };
    Ok(Outcome { data, ok })
}

fn parse_shape(s: &str) -> std::result::Result<(usize, usize), String> {
    let bad = || format!("expected m,n with positive integers, got `{s}`");
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    let m: usize = m.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    Ok((m, n))
}

fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Domain(format!("{THREADS_ENV} must be a positive integer, got `{v}`")));
    }
    match flag {
        Some(0) => Err(Error::Domain("--threads must be at least 1".into())),
        Some(n) => Ok(n),
        None => Ok(std::thread::available_parallelism().map_or(1, usize::from)),
    }
}

fn cmd_search(cfg: &RunConfig, args: &SearchArgs, resume: bool, err: &mut dyn Write) -> Result<Outcome> {
    let search = SearchConfig {
        bound: args.bound,
        m: args.shape.0,
        n: args.shape.1,
        max_results: args.max_results,
        threads: resolve_threads(args.threads)?,
    };
    search.validate()?;
    if cfg.verbose > 0 {
        let _ = writeln!(err, "searching {:?} with {} thread(s)", search, search.threads);
    }
    if let Some(path) = &cfg.output {
        if cfg.format == Format::Text {
            return Err(Error::Domain("search writes JSON lines to --output; drop --format text".into()));
        }
        let summary = search_to_jsonl(&search, path, resume)?;
        let _ = writeln!(
            err,
            "{} solution(s) in {} ms{}",
            summary.count,
            summary.elapsed_ms,
            if summary.resumed { " (resumed)" } else { "" }
        );
        return Ok(Outcome::ok(String::new()));
    }
    let started = std::time::Instant::now();
    let sols = find_solutions(&search)?;
    let data = match cfg.format {
        Format::Json => {
            let mut lines = vec![crate::io::search_header(&search)];
            lines.extend(sols.iter().map(crate::io::search_solution));
            lines.push(crate::io::search_footer(sols.len(), started.elapsed().as_millis()));
            lines.join("\n")
        }
        Format::Text => {
            let mut blocks: Vec<String> = sols.iter().map(pair_text).collect();
            blocks.push(format!("{} solution(s)", sols.len()));
            blocks.join("\n\n")
        }
    };
    Ok(Outcome::ok(data))
}

fn cmd_cross_validate(cfg: &RunConfig, args: &FamilyArgs, bound: u64) -> Result<Outcome> {
    let id: FamilyId = args.family.parse()?;
    let params = parse_params(&args.params)?;
    let cv = cross_validate(id, &params, bound)?;
    let data = match cfg.format {
        Format::Json => pretty(&json!({
            "schema": SCHEMA,
            "family": id.name(),
            "bound": bound,
            "found": cv.found,
            "results": cv.results,
            "canonical": pair_to_json(&cv.canonical),
            "searched": pair_to_json(&cv.support),
        })),
        Format::Text => format!(
            "{}\nsearched shape ({},{}) up to {bound}: {} solution(s), generated pair {}",
            pair_text(&cv.canonical),
            cv.support.a.len(),
            cv.support.b.len(),
            cv.results,
            if cv.found { "found" } else { "NOT found" }
        ),
    };
    Ok(Outcome { data, ok: cv.found })
}
