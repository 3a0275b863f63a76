//! `twistlab verify <suite>`: run a verification suite, print a human
//! summary, and write a deterministic JSON report.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed (the report
//! is still written), 2 invalid usage.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;
use twistlab::report::{run_suite, Report, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "twistlab", version, about = "Exact-arithmetic verification suites")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite and write its JSON report
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// words | symplectic | sp-quotient | trace-kernel | padic | lubin-tate | finite-groups | all
    suite: String,

    /// Presentation degrees: a value, a comma list, or a range like 2..9
    #[arg(long)]
    d: Option<String>,

    /// Genera: a value, a comma list, or a range like 1..4
    #[arg(long)]
    g: Option<String>,

    /// Odd primes, comma separated
    #[arg(long)]
    p: Option<String>,

    /// Residue degrees for the coefficient ring, comma separated
    #[arg(long)]
    f: Option<String>,

    /// Uniformizer: the letter p or an explicit integer
    #[arg(long)]
    pi: Option<String>,

    /// Working precision in p-adic digits
    #[arg(long)]
    precision: Option<i64>,

    /// Series degree cutoff (above 8 needs --allow-heavy)
    #[arg(long)]
    degree: Option<u16>,

    /// Quotient moduli, comma separated
    #[arg(long = "mod")]
    modulus: Option<String>,

    /// Random samples per sampled check
    #[arg(long)]
    samples: Option<u32>,

    /// Seed for all sampled checks; reports are byte-identical per (config, seed)
    #[arg(long)]
    seed: Option<u64>,

    /// Report path; defaults to <suite>.json under TWISTLAB_REPORT_DIR or the
    /// working directory
    #[arg(long)]
    report: Option<PathBuf>,

    /// Raise the caps on expensive checks (degree 12 series, larger quotients)
    #[arg(long)]
    allow_heavy: bool,
}

/// "a..b" (inclusive), "a,b,c", or a single value.
fn parse_list<T>(text: &str, flag: &str) -> Result<Vec<T>, String>
where
    T: std::str::FromStr + TryFrom<u64>,
{
    let bad = || format!("{flag}: cannot parse '{text}'");
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(format!("{flag}: empty range '{text}'"));
        }
        return (lo..=hi).map(|v| T::try_from(v).map_err(|_| bad())).collect();
    }
    text.split(',')
        .map(|part| part.trim().parse::<T>().map_err(|_| bad()))
        .collect()
}

fn build_config(args: &VerifyArgs) -> Result<RunConfig, String> {
    let suite = Suite::parse(&args.suite).ok_or_else(|| {
        format!(
            "unknown suite '{}'; expected words, symplectic, sp-quotient, trace-kernel, \
             padic, lubin-tate, finite-groups, or all",
            args.suite
        )
    })?;
    let mut cfg = RunConfig::defaults(suite);
    if let Some(text) = &args.d {
        cfg.d = parse_list(text, "--d")?;
    }
    if let Some(text) = &args.g {
        cfg.g = parse_list(text, "--g")?;
    }
    if let Some(text) = &args.p {
        cfg.primes = parse_list(text, "--p")?;
    }
    if let Some(text) = &args.f {
        cfg.residue_degrees = parse_list(text, "--f")?;
    }
    if let Some(pi) = &args.pi {
        cfg.pi = pi.clone();
    }
    if let Some(n) = args.precision {
        cfg.precision = n;
    }
    if let Some(d) = args.degree {
        cfg.degree = d;
    }
    if let Some(text) = &args.modulus {
        cfg.moduli = parse_list(text, "--mod")?;
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.allow_heavy = args.allow_heavy;
    Ok(cfg)
}

fn report_path(args: &VerifyArgs, suite: Suite) -> PathBuf {
    if let Some(path) = &args.report {
        return path.clone();
    }
    let name = format!("{}.json", suite.name());
    match std::env::var_os("TWISTLAB_REPORT_DIR") {
        Some(dir) => PathBuf::from(dir).join(name),
        None => PathBuf::from(name),
    }
}

fn print_summary(report: &Report, elapsed: f64, path: &std::path::Path) {
    for record in &report.records {
        let inputs: Vec<String> =
            record.inputs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let mark = if record.passed() { "pass" } else { "FAIL" };
        println!("[{mark}] {}: {} ({})", record.suite, record.name, inputs.join(" "));
        if !record.passed() {
            println!("       expected: {}", record.expected);
            println!("       observed: {}", record.observed);
        }
    }
    let passed = report.records.iter().filter(|r| r.passed()).count();
    println!(
        "{}: {}/{} checks passed in {:.2}s; report written to {}",
        report.verdict,
        passed,
        report.records.len(),
        elapsed,
        path.display()
    );
}

fn run(args: &VerifyArgs) -> Result<ExitCode, String> {
    let cfg = build_config(args)?;
    let started = Instant::now();
    let report = run_suite(&cfg).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();
    let path = report_path(args, cfg.suite);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| format!("cannot create {}: {e}", parent.display()))?;
        }
    }
    std::fs::write(&path, report.to_json())
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    print_summary(&report, elapsed, &path);
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Verify(args) => match run(args) {
            Ok(code) => code,
            Err(message) => {
                eprintln!("error: {message}");
                ExitCode::from(2)
            }
        },
    }
}
