mod parse;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bterms::case_study::sigma::sigma_sieve;
use bterms::case_study::small_n::{f_sign_sweep, monotonicity_check, SweepReport};
use bterms::case_study::theorem::{main_theorem, TheoremOptions};
use bterms::case_study::CaseConfig;
use bterms::exact::{parse_exponent, parse_rat, Exponent, Rat};
use bterms::expansion::{collapse_bterm_growth, simplify_expansion};
use bterms::taylor::{taylor_with_explicit_error, Kernel};
use bterms::RingConfig;
use clap::{Args, Parser, Subcommand};

use report::{monotonicity_stage, sweep_stage, theorem_stages, RunReport, Stage, Status, Verdict};

const EXIT_VIOLATION: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "bterms", version, about = "Certified checks for the divisor-weighted binomial sum F(n)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify F(n) < 0 on a range of n and the exact monotonicity inequality.
    VerifySmall(VerifySmall),
    /// Run the large-n pipeline and write the report.
    AsymptoticReport(AsymptoticReport),
    /// Taylor expansion of a catalog kernel with an explicit remainder.
    Taylor(Taylor),
}

#[derive(Args)]
struct VerifySmall {
    #[arg(long, default_value_t = 5)]
    n_min: u64,
    #[arg(long, default_value_t = 9999)]
    n_max: u64,
    /// Recompute F(n) exactly wherever the interval straddles 0.
    #[arg(long)]
    exact_fallback: bool,
    /// Per-n certified upper bounds of F(n)/C(2n,n).
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Run report; `-` for stdout.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Check (4n+2) a_n > (n+2) a_(n+1) for 3 <= n <= this.
    #[arg(long, default_value_t = 200)]
    monotonicity_max: u64,
    /// Include wall-clock timings (makes reports run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct AsymptoticReport {
    #[arg(long = "N", default_value_t = 10_000)]
    n: u64,
    #[arg(long, default_value = "7/10")]
    alpha: String,
    #[arg(long, default_value = "7/10")]
    beta: String,
    #[arg(long = "cutoff-R", default_value_t = 9)]
    cutoff_r: u32,
    #[arg(long, default_value_t = 4)]
    round_digits: u32,
    /// Run report; `-` for stdout.
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Also run the sweep over 5 <= n < N and the monotonicity check.
    #[arg(long)]
    with_small: bool,
    /// Points where each bound is compared with its certified quantity.
    #[arg(long, value_delimiter = ',', default_value = "10000,20000,100000")]
    soundness_at: Vec<u64>,
    /// Relative width target of the central line integrals.
    #[arg(long, default_value = "1/100")]
    rel_tol: String,
    #[arg(long, default_value_t = 3000)]
    max_panels: usize,
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct Taylor {
    /// exp, geometric, even-geometric or log1p.
    #[arg(long)]
    kernel: String,
    /// Exact argument, e.g. `k*n^(-1) + n^(-1)`.
    #[arg(long)]
    arg: String,
    #[arg(long, default_value_t = 3)]
    order: u32,
    #[arg(long, default_value_t = 10)]
    valid_from: u64,
    #[arg(long, default_value = "0")]
    alpha: String,
    #[arg(long, default_value = "4/7")]
    beta: String,
    #[arg(long)]
    round_digits: Option<u32>,
    /// Collapse all error terms into one k-free B-term.
    #[arg(long)]
    collapse: bool,
    #[arg(long)]
    json: bool,
}

struct Usage(String);

fn exponent(name: &str, s: &str) -> Result<Exponent, Usage> {
    parse_exponent(s).ok_or_else(|| Usage(format!("--{name}: not a rational exponent: {s}")))
}

fn rational(name: &str, s: &str) -> Result<Rat, Usage> {
    parse_rat(s).ok_or_else(|| Usage(format!("--{name}: not a rational: {s}")))
}

fn write_out(path: &Path, text: &str) -> std::io::Result<()> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        std::fs::write(path, text)
    }
}

fn write_csv(path: &Path, sweep: &SweepReport) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "upper_bound", "method"])?;
    for row in &sweep.rows {
        w.write_record([row.n.to_string(), format!("{:e}", row.upper_bound), row.method.as_str().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn timed<T>(on: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    let t = Instant::now();
    let v = f();
    (v, on.then(|| (t.elapsed().as_secs_f64() * 1000.0).round() / 1000.0))
}

fn small_stages(n_min: u64, n_max: u64, exact_fallback: bool, mono_max: u64, timings: bool) -> (Vec<Stage>, SweepReport) {
    let table = sigma_sieve(n_max.max(mono_max + 2) as usize);
    let (sweep, t_sweep) = timed(timings, || f_sign_sweep(n_min, n_max, &table, exact_fallback));
    let (mono, t_mono) = timed(timings, || monotonicity_check(mono_max, &table));
    let mut s = sweep_stage(&sweep);
    s.seconds = t_sweep;
    let mut m = monotonicity_stage(&mono);
    m.seconds = t_mono;
    (vec![s, m], sweep)
}

fn exit_for(stages: &[Stage]) -> u8 {
    if stages.iter().any(|s| s.status == Status::Failed) {
        EXIT_VIOLATION
    } else if stages.iter().any(|s| s.status == Status::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        0
    }
}

fn summary(report: &RunReport) {
    for s in &report.stages {
        let status = match s.status {
            Status::Ok => "ok",
            Status::Failed => "FAILED",
            Status::Inconclusive => "inconclusive",
        };
        let consts: Vec<String> = s.constants.iter().map(|(k, v)| format!("{k} = {}", v.decimal)).collect();
        if consts.is_empty() {
            println!("{:<13} {status}", s.name);
        } else {
            println!("{:<13} {status}  {}", s.name, consts.join(", "));
        }
        if let Some(m) = &s.message {
            println!("{:<13} {m}", "");
        }
    }
    let verdict = match report.verdict {
        Verdict::Settled => "settled",
        Verdict::Incomplete => "incomplete",
        Verdict::Failed => "failed",
    };
    println!("verdict       {verdict}");
}

fn verify_small(a: VerifySmall) -> Result<u8, Usage> {
    if a.n_min < 5 {
        return Err(Usage(format!("--n-min must be at least 5 (got {})", a.n_min)));
    }
    if a.n_min > a.n_max {
        return Err(Usage(format!("--n-min {} exceeds --n-max {}", a.n_min, a.n_max)));
    }
    if a.monotonicity_max < 3 {
        return Err(Usage("--monotonicity-max must be at least 3".into()));
    }
    let (stages, sweep) = small_stages(a.n_min, a.n_max, a.exact_fallback, a.monotonicity_max, a.timings);
    let code = exit_for(&stages);
    let params = BTreeMap::from([
        ("n_min".to_string(), a.n_min.to_string()),
        ("n_max".to_string(), a.n_max.to_string()),
        ("exact_fallback".to_string(), a.exact_fallback.to_string()),
        ("monotonicity_max".to_string(), a.monotonicity_max.to_string()),
    ]);
    let report = RunReport::new("verify-small", params, stages);
    if let Some(p) = &a.csv {
        if let Err(e) = write_csv(p, &sweep) {
            eprintln!("bterms: cannot write {}: {e}", p.display());
            return Ok(EXIT_VIOLATION);
        }
    }
    match &a.json {
        Some(p) if p == Path::new("-") => print!("{}", report.to_json()),
        Some(p) => {
            if let Err(e) = write_out(p, &report.to_json()) {
                eprintln!("bterms: cannot write {}: {e}", p.display());
                return Ok(EXIT_VIOLATION);
            }
            summary(&report);
        }
        None => summary(&report),
    }
    Ok(code)
}

fn asymptotic_report(a: AsymptoticReport) -> Result<u8, Usage> {
    let cfg = CaseConfig {
        n0: a.n,
        alpha_split: exponent("alpha", &a.alpha)?,
        beta: exponent("beta", &a.beta)?,
        cutoff_r: a.cutoff_r,
        round_digits: a.round_digits,
        ..CaseConfig::default()
    };
    if cfg.n0 < 16 {
        return Err(Usage(format!("--N must be at least 16 (got {})", cfg.n0)));
    }
    if cfg.alpha_split <= Exponent::new(1, 2) || cfg.alpha_split >= Exponent::new(3, 4) {
        return Err(Usage(format!("--alpha must lie strictly between 1/2 and 3/4 (got {})", a.alpha)));
    }
    if cfg.beta < cfg.alpha_split || cfg.beta >= Exponent::from_integer(1) {
        return Err(Usage(format!("--beta must satisfy alpha <= beta < 1 (got {})", a.beta)));
    }
    if cfg.cutoff_r < 3 || cfg.cutoff_r.is_multiple_of(2) {
        return Err(Usage(format!("--cutoff-R must be an odd integer >= 3 (got {})", cfg.cutoff_r)));
    }
    let mut opts = TheoremOptions { soundness_at: a.soundness_at.clone(), ..TheoremOptions::default() };
    opts.line.rel_tol = rational("rel-tol", &a.rel_tol)?;
    opts.line.max_panels = a.max_panels;

    let mut stages = Vec::new();
    if a.with_small {
        let (s, _) = small_stages(5, cfg.n0 - 1, true, 200, a.timings);
        stages.extend(s);
    }
    let (result, secs) = timed(a.timings, || main_theorem(&cfg, &opts));
    let failed_stage = match result {
        Ok(t) => {
            let mut s = theorem_stages(&t);
            if let Some(last) = s.last_mut() {
                last.seconds = secs;
            }
            stages.extend(s);
            None
        }
        Err(e) => {
            let name = e.stage();
            eprintln!("bterms: stage {name} failed: {e}");
            stages.push(Stage::new(name, Status::Failed).message(e.to_string()));
            Some(name)
        }
    };
    let params = BTreeMap::from([
        ("N".to_string(), cfg.n0.to_string()),
        ("alpha".to_string(), a.alpha.clone()),
        ("beta".to_string(), a.beta.clone()),
        ("cutoff_R".to_string(), cfg.cutoff_r.to_string()),
        ("round_digits".to_string(), cfg.round_digits.to_string()),
        ("rel_tol".to_string(), a.rel_tol.clone()),
        ("max_panels".to_string(), a.max_panels.to_string()),
        ("soundness_at".to_string(), a.soundness_at.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")),
        ("with_small".to_string(), a.with_small.to_string()),
    ]);
    let report = RunReport::new("asymptotic-report", params, stages);
    let code = if failed_stage.is_some() { EXIT_VIOLATION } else { exit_for(&report.stages) };
    match &a.json {
        Some(p) if p == Path::new("-") => print!("{}", report.to_json()),
        Some(p) => {
            if let Err(e) = write_out(p, &report.to_json()) {
                eprintln!("bterms: cannot write {}: {e}", p.display());
                return Ok(EXIT_VIOLATION);
            }
            summary(&report);
        }
        None => summary(&report),
    }
    Ok(code)
}

fn taylor(a: Taylor) -> Result<u8, Usage> {
    let kernel = Kernel::from_name(&a.kernel).map_err(|e| Usage(e.to_string()))?;
    let mut cfg = RingConfig::new(exponent("alpha", &a.alpha)?, exponent("beta", &a.beta)?)
        .map_err(|e| Usage(e.to_string()))?;
    cfg.round_digits = a.round_digits;
    let arg = parse::parse_expansion(&cfg, &a.arg).map_err(|e| Usage(format!("--arg: {e}")))?;
    let ex = match taylor_with_explicit_error(&kernel, &arg, a.order, a.valid_from) {
        Ok(ex) => simplify_expansion(&ex),
        Err(e) => {
            eprintln!("bterms: {e}");
            return Ok(EXIT_VIOLATION);
        }
    };
    let ex = if a.collapse {
        match collapse_bterm_growth(&ex) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("bterms: {e}");
                return Ok(EXIT_VIOLATION);
            }
        }
    } else {
        ex
    };
    if a.json {
        println!("{}", serde_json::to_string_pretty(&ex.to_json()).expect("serializable"));
    } else {
        println!("{ex}");
    }
    Ok(0)
}

fn configure_threads() -> Result<(), Usage> {
    let Ok(v) = std::env::var("RA_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Usage(format!("RA_THREADS: not a positive integer: {v}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = configure_threads().and_then(|()| match cli.command {
        Command::VerifySmall(a) => verify_small(a),
        Command::AsymptoticReport(a) => asymptotic_report(a),
        Command::Taylor(a) => taylor(a),
    });
    match run {
        Ok(code) => ExitCode::from(code),
        Err(Usage(m)) => {
            eprintln!("bterms: {m}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
