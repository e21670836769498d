//! Command implementations for the `zomat` binary.
//!
//! Every command writes its files deterministically: reruns with the same
//! flags and seed produce byte-identical output. Wall-clock timings only go
//! to standard output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use zomat_core::extremal::DEFAULT_BUDGET;
use zomat_core::pipeline::stats::{pipeline_stats, Regime, StatsRecord};
use zomat_core::pipeline::{DEFAULT_EPSILON, DEFAULT_RETRIES};
use zomat_core::{embed_column_t_partite, embed_via_pipeline, ex_exact, Error, Matrix01, Pattern};

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    NotFound = 1,
    Usage = 2,
    BudgetExhausted = 3,
}

#[derive(Debug, Parser)]
#[command(name = "zomat", version, about = "Zero-one matrix pattern experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact ex(n, A) over a range of n, with certificates.
    ExTable(ExTableArgs),
    /// Least-squares slope of log(value) against log(n) for a table.
    FitExponent(FitArgs),
    /// Run the embedding pipeline on one matrix.
    Pipeline(PipelineArgs),
    /// Bad-set statistics over random base rows.
    Stats(StatsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct ExTableArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    /// A single n, an inclusive range `a..b`, or a list `a,b,c`.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// A table written by `ex-table` (`.csv` or `.json`).
    #[arg(long)]
    pub table: PathBuf,
    /// Also write the report to `<out>/fit.txt`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    /// Host matrix in `.zom` format. Without it a random matrix is drawn.
    #[arg(long, conflicts_with_all = ["n", "density"])]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub density: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, default_value_t = DEFAULT_RETRIES)]
    pub retries: usize,
    /// Use the column-t-partite variant.
    #[arg(long)]
    pub column_partite: bool,
    /// Column cut widths such as `1,1`; detected when omitted.
    #[arg(long, requires = "column_partite")]
    pub cut: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RegimeArg {
    General,
    ColumnPartite,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub pattern: PathBuf,
    /// Host matrix in `.zom` format; otherwise one random matrix per n.
    #[arg(long, conflicts_with_all = ["n", "density"])]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, alias = "trials", default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = RegimeArg::ColumnPartite)]
    pub regime: RegimeArg,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

/// Parse `7`, `2..5` (inclusive) or `8,16,32`.
pub fn parse_n_spec(spec: &str) -> Result<Vec<usize>> {
    let spec = spec.trim();
    let ns: Vec<usize> = if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (usize, usize) = (a.parse()?, b.parse()?);
        if a > b {
            bail!("empty range {spec}");
        }
        (a..=b).collect()
    } else {
        spec.split(',').map(|x| x.trim().parse()).collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.contains(&0) {
        bail!("n must be at least 1 in {spec:?}");
    }
    Ok(ns)
}

fn read_pattern(path: &Path) -> Result<Pattern> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Pattern::parse(&text).with_context(|| format!("parsing pattern {}", path.display()))
}

fn read_matrix(path: &Path) -> Result<Matrix01> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Matrix01::parse_zom(&text).with_context(|| format!("parsing matrix {}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// First 16 hex digits of the SHA-256 of the pattern's `.zom` text.
pub fn pattern_hash(pattern: &Pattern) -> String {
    let digest = Sha256::digest(pattern.matrix().to_zom().as_bytes());
    hex::encode(&digest[..8])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExRow {
    pub n: usize,
    pub value: usize,
    pub mode: String,
    pub nodes: u64,
}

pub fn cmd_ex_table(args: &ExTableArgs) -> Result<Exit> {
    let pattern = read_pattern(&args.pattern)?;
    let ns = parse_n_spec(&args.n)?;
    let hash = pattern_hash(&pattern);
    let results: Vec<(usize, Result<_, Error>, f64)> = ns
        .par_iter()
        .map(|&n| {
            let start = Instant::now();
            let r = ex_exact(n, &pattern, args.budget);
            (n, r, start.elapsed().as_secs_f64())
        })
        .collect();
    let mut rows = Vec::new();
    let mut exhausted = false;
    for (n, result, seconds) in results {
        let cert = match result {
            Ok(cert) => cert,
            Err(Error::BudgetExhausted { best, .. }) => {
                exhausted = true;
                *best
            }
            Err(e) => return Err(e).with_context(|| format!("computing ex({n}, A)")),
        };
        let path = args.out.join("certs").join(&hash).join(format!("{n}.cert"));
        write(&path, &cert.to_text())?;
        println!(
            "n={n} value={} mode={} nodes={} seconds={seconds:.3}",
            cert.value, cert.mode, cert.nodes
        );
        rows.push(ExRow {
            n,
            value: cert.value,
            mode: cert.mode.to_string(),
            nodes: cert.nodes,
        });
    }
    for w in rows.windows(2) {
        if w[0].value > 0 && w[1].value > 0 {
            let slope = (w[1].value as f64).ln() - (w[0].value as f64).ln();
            let slope = slope / ((w[1].n as f64).ln() - (w[0].n as f64).ln());
            eprintln!("log-log slope {}..{}: {slope:.4}", w[0].n, w[1].n);
        }
    }
    let table = match args.format {
        Format::Csv => {
            let mut s = String::from("n,value,mode,nodes\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, r.value, r.mode, r.nodes);
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    write(&args.out.join(format!("ex_table.{}", args.format.ext())), &table)?;
    Ok(if exhausted {
        Exit::BudgetExhausted
    } else {
        Exit::Success
    })
}

/// Read `(n, value)` pairs from a CSV or JSON table.
pub fn read_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let rows: Vec<ExRow> = serde_json::from_str(&text)?;
        return Ok(rows.iter().map(|r| (r.n as f64, r.value as f64)).collect());
    }
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().context("empty table")?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let (ni, vi) = col("n").zip(col("value")).context("table needs n and value columns")?;
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let get = |i: usize| -> Result<f64> {
                Ok(f.get(i).context("short row")?.trim().parse::<f64>()?)
            };
            Ok((get(ni)?, get(vi)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    /// `(n_i, n_{i+1}, slope)` for consecutive rows.
    pub gaps: Vec<(f64, f64, f64)>,
}

/// Ordinary least squares of `ln(value)` on `ln(n)`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<Fit, Error> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 rows, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(n, v)| n <= 0.0 || v <= 0.0) {
        return Err(Error::InvalidArgument("n and value must be positive".into()));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(n, v)| (n.ln(), v.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all rows share one n".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let gaps = points
        .windows(2)
        .zip(logs.windows(2))
        .map(|(p, l)| (p[0].0, p[1].0, (l[1].1 - l[0].1) / (l[1].0 - l[0].0)))
        .collect();
    Ok(Fit {
        slope,
        intercept: my - slope * mx,
        gaps,
    })
}

pub fn cmd_fit_exponent(args: &FitArgs) -> Result<Exit> {
    let points = read_table(&args.table)?;
    let fit = fit_exponent(&points)?;
    let mut report = format!("rows: {}\nslope: {:.9}\nintercept: {:.9}\n", points.len(), fit.slope, fit.intercept);
    for (a, b, s) in &fit.gaps {
        let _ = writeln!(report, "gap {a}..{b}: {s:.9}");
    }
    print!("{report}");
    if let Some(out) = &args.out {
        write(&out.join("fit.txt"), &report)?;
    }
    Ok(Exit::Success)
}

fn parse_cut(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad cut width {x:?}")))
        .collect()
}

pub fn cmd_pipeline(args: &PipelineArgs) -> Result<Exit> {
    let pattern = read_pattern(&args.pattern)?;
    let m = match (&args.matrix, args.n) {
        (Some(path), _) => read_matrix(path)?,
        (None, Some(n)) => {
            let density = args.density.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&density) {
                bail!("density {density} outside [0, 1]");
            }
            Matrix01::random(n, n, density, &mut ChaCha8Rng::seed_from_u64(args.seed))
        }
        (None, None) => bail!("give either --matrix or --n"),
    };
    let outcome = if args.column_partite {
        let pattern = match &args.cut {
            Some(cut) => Pattern::with_cut(pattern.matrix().clone(), parse_cut(cut)?)?,
            None => Pattern::with_detected_cut(pattern.matrix().clone())?,
        };
        if pattern.column_cut().is_none() {
            bail!("pattern is not column-t-partite");
        }
        embed_column_t_partite(&m, &pattern, args.seed, args.retries)?
    } else {
        embed_via_pipeline(&m, &pattern, args.epsilon, args.seed, args.retries)?
    };
    let mut report = String::new();
    let _ = writeln!(report, "n: {}", m.n_rows());
    let _ = writeln!(report, "weight: {}", m.weight());
    let _ = writeln!(report, "variant: {}", if args.column_partite { "column-partite" } else { "general" });
    let _ = writeln!(report, "k: {}", outcome.trace.k);
    let _ = writeln!(report, "s: {}", outcome.trace.s);
    let _ = writeln!(report, "path: {}", outcome.path.as_str());
    let _ = writeln!(report, "attempts: {}", outcome.trace.attempts.len());
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    match &outcome.embedding {
        Some(e) => {
            e.validate(&m, pattern.matrix())?;
            let _ = writeln!(report, "rows: {}", join(&e.row_map));
            let _ = writeln!(report, "cols: {}", join(&e.col_map));
        }
        None => {
            let _ = writeln!(report, "rows: -");
            let _ = writeln!(report, "cols: -");
        }
    }
    for (count, num) in &outcome.trace.histogram {
        let _ = writeln!(report, "shrinking {count}: {num}");
    }
    print!("{report}");
    write(&args.out.join("report.txt"), &report)?;
    write(&args.out.join("trace.txt"), &outcome.trace.to_text())?;
    Ok(if outcome.embedding.is_some() {
        Exit::Success
    } else {
        Exit::NotFound
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub samples: usize,
    pub mean_c: f64,
    pub tsets: u64,
    pub light: u64,
    pub heavy: u64,
    pub bad: u64,
    pub heavy_and_bad: u64,
    pub bad_fraction: f64,
    pub heavy_fraction: f64,
    pub heavy_and_bad_fraction: f64,
    pub threshold: f64,
    pub bound: f64,
    pub bound_checks: u64,
    pub bound_violations: u64,
    pub max_conditional_bad: f64,
    pub branching_checks: u64,
    pub branching_mismatches: u64,
}

/// Rounded so that CSV and JSON print identical values.
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

impl StatsRow {
    fn from_record(r: &StatsRecord) -> Self {
        StatsRow {
            n: r.n,
            k: r.k,
            s: r.s,
            samples: r.samples,
            mean_c: round6(r.mean_c),
            tsets: r.tsets,
            light: r.light,
            heavy: r.heavy,
            bad: r.bad,
            heavy_and_bad: r.heavy_and_bad,
            bad_fraction: round6(r.bad_fraction()),
            heavy_fraction: round6(r.heavy_fraction()),
            heavy_and_bad_fraction: round6(r.heavy_and_bad_fraction()),
            threshold: round6(r.threshold),
            bound: round6(r.bound),
            bound_checks: r.bound_checks,
            bound_violations: r.bound_violations,
            max_conditional_bad: round6(r.max_conditional_bad),
            branching_checks: r.branching_checks,
            branching_mismatches: r.branching_mismatches,
        }
    }
}

pub const STATS_COLUMNS: &str = "n,k,s,samples,mean_c,tsets,light,heavy,bad,heavy_and_bad,bad_fraction,heavy_fraction,\
heavy_and_bad_fraction,threshold,bound,bound_checks,bound_violations,max_conditional_bad,branching_checks,\
branching_mismatches";

pub fn cmd_stats(args: &StatsArgs) -> Result<Exit> {
    let pattern = read_pattern(&args.pattern)?;
    let regime = match args.regime {
        RegimeArg::General => Regime::General { epsilon: args.epsilon },
        RegimeArg::ColumnPartite => Regime::ColumnPartite,
    };
    let hosts: Vec<Matrix01> = match (&args.matrix, &args.n) {
        (Some(path), _) => vec![read_matrix(path)?],
        (None, Some(spec)) => {
            if !(0.0..=1.0).contains(&args.density) {
                bail!("density {} outside [0, 1]", args.density);
            }
            parse_n_spec(spec)?
                .into_iter()
                .map(|n| {
                    let seed = args.seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                    Matrix01::random(n, n, args.density, &mut ChaCha8Rng::seed_from_u64(seed))
                })
                .collect()
        }
        (None, None) => bail!("give either --matrix or --n"),
    };
    let records: Vec<StatsRecord> = hosts
        .par_iter()
        .map(|m| pipeline_stats(m, &pattern, regime, args.samples, args.seed))
        .collect::<Result<_, Error>>()?;
    let rows: Vec<StatsRow> = records.iter().map(StatsRow::from_record).collect();
    for r in &rows {
        println!(
            "n={} mean_c={:.3} bad={:.4} heavy_and_bad={:.4} bound={:.4} checks={} violations={}",
            r.n, r.mean_c, r.bad_fraction, r.heavy_and_bad_fraction, r.bound, r.bound_checks, r.bound_violations
        );
    }
    let table = match args.format {
        Format::Csv => {
            let mut s = format!("{STATS_COLUMNS}\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.n,
                    r.k,
                    r.s,
                    r.samples,
                    r.mean_c,
                    r.tsets,
                    r.light,
                    r.heavy,
                    r.bad,
                    r.heavy_and_bad,
                    r.bad_fraction,
                    r.heavy_fraction,
                    r.heavy_and_bad_fraction,
                    r.threshold,
                    r.bound,
                    r.bound_checks,
                    r.bound_violations,
                    r.max_conditional_bad,
                    r.branching_checks,
                    r.branching_mismatches
                );
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
    };
    write(&args.out.join(format!("stats.{}", args.format.ext())), &table)?;
    let violated = records.iter().any(|r| !r.ok());
    Ok(if violated { Exit::NotFound } else { Exit::Success })
}

/// Size the global thread pool from `ZOMAT_THREADS` if it is set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ZOMAT_THREADS") {
        let n: usize = v.parse().with_context(|| format!("ZOMAT_THREADS={v:?} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

pub fn run(cli: &Cli) -> Result<Exit> {
    init_threads()?;
    match &cli.command {
        Command::ExTable(a) => cmd_ex_table(a),
        Command::FitExponent(a) => cmd_fit_exponent(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Stats(a) => cmd_stats(a),
    }
}
