//! `ndcomm`: batch driver for the protocol sweeps and lower-bound solvers.

use std::fs;
use std::io::{self, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndcomm_core::boundslab::{
    self, all_condition_sets, bound_table, certify_independence, check_counting_inequalities,
    diagonal_cover_lower_bound, max_condition_set, min_one_cover, BoundRow, Certificate,
    CliqueMode, CliqueResult, CountingReport, CoverResult, CoverTarget, FunctionTable,
};
use ndcomm_core::heqfun::{heq, DEFAULT_PAIR_BUDGET};
use ndcomm_core::protocols::{
    proof_space, verify_strong_nondeterminism, verify_weak_nondeterminism, ClassicalHeq, QuantumHeq,
};
use ndcomm_core::{HeqInput, HeqParams, InstanceMode, Instances, VerificationReport};
use num_bigint::BigUint;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "ndcomm",
    version,
    about = "Nondeterministic communication experiments"
)]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, env = "NDCOMM_THREADS")]
    threads: Option<usize>,

    /// Embed the wall-clock duration in the report (breaks byte-identical reruns).
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep a protocol over instances and proofs.
    Verify(VerifyArgs),
    /// Check the counting inequalities and tabulate the complexity bounds.
    Bounds(BoundsArgs),
    /// Exact minimum rectangle cover of a small function.
    Cover(CoverArgs),
    /// Largest input set whose pairwise delta patterns avoid the code.
    Clique(CliqueArgs),
    /// Certify linear independence of the reduced polynomials.
    Polycheck(PolycheckArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ProtocolArg {
    QuantumHeq,
    ClassicalHeq,
    Neq,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SweepMode {
    Exhaustive,
    Diagonal,
    Sample,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    protocol: ProtocolArg,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    kprime: Option<u32>,
    /// Input length for `neq`.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum, default_value = "exhaustive")]
    mode: SweepMode,
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum number of instance pairs.
    #[arg(long, default_value_t = DEFAULT_PAIR_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    /// Inclusive range `a..b` of `k`.
    #[arg(long, default_value = "3..8")]
    k: String,
    /// Inclusive range of `k'`; a start of `k` means `k' >= k` only.
    #[arg(long = "kprime-rel", default_value = "k..12")]
    kprime_rel: String,
    /// Range of `k` for the `k' = 2k` rows.
    #[arg(long, default_value = "3..20")]
    separation: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FunctionArg {
    Heq,
    Neq,
    Const,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum TargetArg {
    Diagonal,
    AllOnes,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args, Debug, Serialize)]
struct CoverArgs {
    #[arg(long, value_enum)]
    function: FunctionArg,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    kprime: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    /// Side length for `const`.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long, value_enum, default_value = "all-ones")]
    target: TargetArg,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Maximum number of table cells.
    #[arg(long, default_value_t = boundslab::DEFAULT_COVER_BUDGET)]
    budget: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CliqueModeArg {
    Exact,
    Heuristic,
}

#[derive(Args, Debug, Serialize)]
struct CliqueArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    kprime: u32,
    #[arg(long, value_enum, default_value = "exact")]
    mode: CliqueModeArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 16)]
    restarts: u32,
    #[arg(long, default_value_t = 4096)]
    tries: u32,
    /// Maximum number of graph vertices in exact mode.
    #[arg(long, default_value_t = boundslab::DEFAULT_CLIQUE_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug, Serialize)]
struct PolycheckArgs {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    kprime: u32,
    /// Certify every condition set instead of one maximum set.
    #[arg(long)]
    all_valid_sets: bool,
    #[arg(long, default_value_t = 1 << 16)]
    max_sets: usize,
    #[arg(long, default_value_t = boundslab::DEFAULT_CLIQUE_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = boundslab::DEFAULT_MONOMIAL_BUDGET)]
    monomial_budget: u64,
}

#[derive(Serialize)]
struct Report<'a, C: Serialize, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    config: &'a C,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    duration_ms: Option<u128>,
    result: R,
}

/// What a subcommand hands back: the report body, its failure count, and an
/// optional replacement for the JSON output (CSV export).
struct Outcome<R> {
    result: R,
    failures: usize,
    raw: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(n) => {
            eprintln!("ndcomm: {n} failure(s)");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("ndcomm: error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<usize> {
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring thread pool")?;
    }
    let start = Instant::now();
    match &cli.command {
        Command::Verify(a) => emit(cli, "verify", a, start, cmd_verify(a)?),
        Command::Bounds(a) => emit(cli, "bounds", a, start, cmd_bounds(a)?),
        Command::Cover(a) => emit(cli, "cover", a, start, cmd_cover(a)?),
        Command::Clique(a) => emit(cli, "clique", a, start, cmd_clique(a)?),
        Command::Polycheck(a) => emit(cli, "polycheck", a, start, cmd_polycheck(a)?),
    }
}

fn emit<C: Serialize, R: Serialize>(
    cli: &Cli,
    command: &'static str,
    config: &C,
    start: Instant,
    out: Outcome<R>,
) -> Result<usize> {
    let elapsed = start.elapsed();
    let text = match out.raw {
        Some(raw) => raw,
        None => {
            let report = Report {
                tool: "ndcomm",
                version: ndcomm_core::VERSION,
                command,
                config,
                failures: out.failures,
                duration_ms: cli.timing.then_some(elapsed.as_millis()),
                result: out.result,
            };
            let mut s = serde_json::to_string_pretty(&report)?;
            s.push('\n');
            s
        }
    };
    match &cli.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    eprintln!("ndcomm {command}: {:.3} s", elapsed.as_secs_f64());
    Ok(out.failures)
}

fn params(k: Option<u32>, kprime: Option<u32>) -> Result<HeqParams> {
    let (Some(k), Some(kp)) = (k, kprime) else {
        bail!("--k and --kprime are required");
    };
    Ok(HeqParams::new(k, kp)?)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome<VerificationReport>> {
    let report = match a.protocol {
        ProtocolArg::Neq => {
            let Some(n) = a.n else {
                bail!("--n is required for neq")
            };
            verify_strong_nondeterminism(n, a.budget)?
        }
        ProtocolArg::QuantumHeq | ProtocolArg::ClassicalHeq => {
            let p = params(a.k, a.kprime)?;
            let mode = match a.mode {
                SweepMode::Exhaustive => InstanceMode::Exhaustive,
                SweepMode::Diagonal => InstanceMode::Diagonal,
                SweepMode::Sample => {
                    let Some(seed) = a.seed else {
                        bail!("--seed is required with --mode sample")
                    };
                    InstanceMode::Sample {
                        count: a.count,
                        seed,
                    }
                }
            };
            let inst = Instances::new(p, mode, a.budget)?;
            let proofs = proof_space(p.k);
            match a.protocol {
                ProtocolArg::QuantumHeq => {
                    verify_weak_nondeterminism(&QuantumHeq, heq, &inst, &proofs)
                }
                _ => verify_weak_nondeterminism(&ClassicalHeq, heq, &inst, &proofs),
            }
        }
    };
    Ok(Outcome {
        failures: report.failures.len(),
        result: report,
        raw: None,
    })
}

/// Parses `a..b` (inclusive); `rel` allows the literal start `k`.
fn parse_range(s: &str, rel: Option<u32>) -> Result<RangeInclusive<u32>> {
    let (lo, hi) = s
        .split_once("..")
        .with_context(|| format!("range {s:?} is not of the form a..b"))?;
    let lo = match (lo.trim(), rel) {
        ("k", Some(k)) => k,
        (t, _) => t
            .parse()
            .with_context(|| format!("bad range start in {s:?}"))?,
    };
    let hi: u32 = hi
        .trim()
        .parse()
        .with_context(|| format!("bad range end in {s:?}"))?;
    if lo > hi {
        bail!("empty range {s:?}");
    }
    Ok(lo..=hi)
}

#[derive(Serialize)]
struct BoundsResult {
    counting: CountingReport,
    table: Vec<BoundRow>,
}

fn cmd_bounds(a: &BoundsArgs) -> Result<Outcome<BoundsResult>> {
    let ks = parse_range(&a.k, None)?;
    let kprimes = parse_range(&a.kprime_rel, Some(*ks.start()))?;
    let separation = parse_range(&a.separation, None)?;
    let counting = check_counting_inequalities(ks.clone(), kprimes.clone())?;
    let table = bound_table(ks, kprimes, separation);
    let failures = counting.violations.len();
    Ok(Outcome {
        result: BoundsResult { counting, table },
        failures,
        raw: None,
    })
}

#[derive(Serialize)]
struct CoverReport {
    rows: usize,
    cols: usize,
    #[serde(flatten)]
    cover: CoverResult,
}

fn cmd_cover(a: &CoverArgs) -> Result<Outcome<CoverReport>> {
    let f = match a.function {
        FunctionArg::Heq => FunctionTable::heq(params(a.k, a.kprime)?, a.budget)?,
        FunctionArg::Neq => {
            let Some(n) = a.n else {
                bail!("--n is required for neq")
            };
            FunctionTable::neq(n, a.budget)?
        }
        FunctionArg::Const => {
            let Some(size) = a.size else {
                bail!("--size is required for const")
            };
            FunctionTable::constant(size, size, true, a.budget)?
        }
    };
    let target = match a.target {
        TargetArg::Diagonal => CoverTarget::Diagonal,
        TargetArg::AllOnes => CoverTarget::AllOnes,
    };
    let cover = min_one_cover(&f, target)?;
    let failures = usize::from(cover.witness.verify(&f).is_err());
    eprintln!(
        "cover size {}: N >= ceil(log2 {}) = {}",
        cover.size, cover.size, cover.communication_bound
    );
    let raw = if a.format == FormatArg::Csv {
        let mut buf = Vec::new();
        cover.witness.write_csv(&mut buf)?;
        Some(String::from_utf8(buf)?)
    } else {
        None
    };
    Ok(Outcome {
        result: CoverReport {
            rows: f.rows(),
            cols: f.cols(),
            cover,
        },
        failures,
        raw,
    })
}

#[derive(Serialize)]
struct CliqueReport {
    #[serde(flatten)]
    clique: CliqueResult,
    /// Derived from an exact maximum only.
    #[serde(skip_serializing_if = "Option::is_none")]
    diagonal_cover_lower_bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nondeterministic_lower_bound: Option<u64>,
}

fn cmd_clique(a: &CliqueArgs) -> Result<Outcome<CliqueReport>> {
    let p = HeqParams::new(a.k, a.kprime)?;
    let mode = match a.mode {
        CliqueModeArg::Exact => CliqueMode::Exact,
        CliqueModeArg::Heuristic => {
            let Some(seed) = a.seed else {
                bail!("--seed is required with --mode heuristic")
            };
            CliqueMode::Heuristic {
                seed,
                restarts: a.restarts,
                tries: a.tries,
            }
        }
    };
    let clique = max_condition_set(p, mode, a.budget)?;
    let (bound, n) = if clique.exact {
        let b = diagonal_cover_lower_bound(a.k, a.kprime, &BigUint::from(clique.size))?;
        let n = boundslab::counting::ceil_log2_big(&b);
        (Some(b.to_string()), Some(n))
    } else {
        (None, None)
    };
    Ok(Outcome {
        result: CliqueReport {
            clique,
            diagonal_cover_lower_bound: bound,
            nondeterministic_lower_bound: n,
        },
        failures: 0,
        raw: None,
    })
}

#[derive(Serialize)]
struct PolyFailure {
    set: Vec<Vec<u32>>,
    error: String,
}

#[derive(Serialize)]
struct PolycheckReport {
    sets_checked: usize,
    largest_set: usize,
    certificates: Vec<Certificate>,
    failures: Vec<PolyFailure>,
}

fn cmd_polycheck(a: &PolycheckArgs) -> Result<Outcome<PolycheckReport>> {
    let p = HeqParams::new(a.k, a.kprime)?;
    let sets: Vec<Vec<HeqInput>> = if a.all_valid_sets {
        all_condition_sets(p, a.budget, a.max_sets)?
    } else {
        vec![max_condition_set(p, CliqueMode::Exact, a.budget)?.witness]
    };
    let mut certificates = Vec::with_capacity(sets.len());
    let mut failures = Vec::new();
    for set in &sets {
        match certify_independence(set, a.monomial_budget) {
            Ok(c) => certificates.push(c),
            Err(e @ boundslab::CertifyError::Setup(ndcomm_core::Error::BudgetExceeded { .. })) => {
                return Err(e.into())
            }
            Err(e) => failures.push(PolyFailure {
                set: set.iter().map(|x| x.entries().to_vec()).collect(),
                error: e.to_string(),
            }),
        }
    }
    let report = PolycheckReport {
        sets_checked: sets.len(),
        largest_set: sets.iter().map(Vec::len).max().unwrap_or(0),
        certificates,
        failures,
    };
    Ok(Outcome {
        failures: report.failures.len(),
        result: report,
        raw: None,
    })
}
