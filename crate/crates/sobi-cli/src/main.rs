//! Command-line front end: generate synthetic mixtures, separate
//! recordings, benchmark the two diagonalization routes, and score
//! separations against ground truth.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use sobi::evaluate::{
    amari_index, bench, matched_correlation, separate, Method, SeparationConfig,
};
use sobi::ingest::{
    read_edf, read_recording, write_bin, write_csv, Format,
};
use sobi::jointdiag::schur::LagChoice;
use sobi::matrix::RealMatrix;
use sobi::model::{
    generate_sources, mix, random_orthogonal, GroundTruth, Recording, SourceSpec,
};
use sobi::whitening::WhiteningMethod;

#[derive(Parser)]
#[command(
    name = "sobi",
    about = "Blind source separation from lagged covariances, two ways",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic mixed recording plus its ground truth.
    Gen(GenArgs),
    /// Separate a recording into estimated sources.
    Separate(SeparateArgs),
    /// Time both separation methods on one input.
    Bench(BenchArgs),
    /// Score estimated sources against ground truth.
    Eval(EvalArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Number of recorded channels (must be >= sources).
    #[arg(long)]
    channels: usize,
    /// Number of latent sources.
    #[arg(long)]
    sources: usize,
    /// Samples per channel.
    #[arg(long)]
    samples: usize,
    /// Sensor noise standard deviation.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Generator seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sample rate in Hz (used by sinusoid sources and recorded in CSV).
    #[arg(long, default_value_t = 160.0)]
    sample_rate: f64,
    /// Source family when no explicit coefficients are given.
    #[arg(long, default_value = "sine", value_parser = ["sine", "ar1"])]
    source_kind: String,
    /// Explicit AR(1) coefficients, comma separated (overrides --source-kind).
    #[arg(long)]
    ar1: Option<String>,
    /// Explicit sinusoid frequencies in Hz, comma separated (overrides --source-kind).
    #[arg(long)]
    freqs: Option<String>,
    /// Format of the mixed recording (ground truth is always bss1).
    #[arg(long, default_value = "bss1")]
    format: String,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    /// Retained source count (largest-relative-eigengap rule when absent;
    /// pass it explicitly when the source count is known).
    #[arg(long)]
    n: Option<usize>,
    /// Lag set: "1..100" or an explicit list "2,3,5". Default 1..min(100, T/3).
    #[arg(long)]
    lags: Option<String>,
    /// Rotation threshold of the sweep solver (default 1e-8/sqrt(n)).
    #[arg(long)]
    tol: Option<f64>,
    /// Sweep budget of the sweep solver.
    #[arg(long, default_value_t = 100)]
    max_sweeps: usize,
    /// Which lagged covariance the Schur route decomposes.
    #[arg(long, default_value = "first", value_parser = ["first", "best-gap"])]
    lag_choice: String,
    /// Whitening route.
    #[arg(long, default_value = "eig", value_parser = ["eig", "svd"])]
    whitening: String,
}

#[derive(Args)]
struct InputArgs {
    /// Input recording (csv, bss1, or edf; sniffed from magic bytes then
    /// extension).
    #[arg(long)]
    input: PathBuf,
    /// Force the input format instead of sniffing.
    #[arg(long)]
    format: Option<String>,
    /// EDF only: retain just these channel labels (comma separated).
    #[arg(long)]
    channels: Option<String>,
}

#[derive(Args)]
struct SeparateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Diagonalization method.
    #[arg(long, value_parser = ["givens", "schur"])]
    method: String,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Output directory for the factor files and the diagnostics report.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Timed runs per method (after one untimed warm-up).
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    /// Ground-truth mixing matrix for quality metrics.
    #[arg(long)]
    truth_mixing: Option<PathBuf>,
    /// Ground-truth sources for quality metrics.
    #[arg(long)]
    truth_sources: Option<PathBuf>,
    /// Where to write the TOML report.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Estimated sources file.
    #[arg(long)]
    estimated: PathBuf,
    /// True sources file.
    #[arg(long)]
    truth: PathBuf,
    /// Unitary factor from the separation (enables the amari index
    /// together with --w and --mixing).
    #[arg(long)]
    u: Option<PathBuf>,
    /// Whitening matrix from the separation.
    #[arg(long)]
    w: Option<PathBuf>,
    /// True mixing matrix.
    #[arg(long)]
    mixing: Option<PathBuf>,
}

fn main() {
    let result = match Cli::parse().command {
        Command::Gen(args) => cmd_gen(args),
        Command::Separate(args) => cmd_separate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Eval(args) => cmd_eval(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn parse_list(text: &str, what: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .with_context(|| format!("bad {what} entry {f:?}"))
        })
        .collect()
}

fn parse_lags(text: &str) -> anyhow::Result<Vec<usize>> {
    if let Some((a, b)) = text.split_once("..") {
        let start: usize = a.trim().parse().context("bad lag range start")?;
        let end: usize = b.trim().parse().context("bad lag range end")?;
        if start == 0 || end < start {
            bail!("lag range {text:?} is empty or starts at zero");
        }
        return Ok((start..=end).collect());
    }
    let lags: Vec<usize> = text
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<usize>()
                .with_context(|| format!("bad lag entry {f:?}"))
        })
        .collect::<anyhow::Result<_>>()?;
    Ok(lags)
}

fn pipeline_config(args: &PipelineArgs) -> anyhow::Result<SeparationConfig> {
    Ok(SeparationConfig {
        n: args.n,
        lags: args.lags.as_deref().map(parse_lags).transpose()?,
        tol: args.tol,
        max_sweeps: args.max_sweeps,
        lag_choice: args.lag_choice.parse::<LagChoice>()?,
        whitening: args.whitening.parse::<WhiteningMethod>()?,
    })
}

fn load_recording(args: &InputArgs) -> anyhow::Result<Recording> {
    let format = args
        .format
        .as_deref()
        .map(str::parse::<Format>)
        .transpose()?;
    let rec = if let Some(channels) = &args.channels {
        let labels: Vec<String> = channels.split(',').map(|s| s.trim().to_string()).collect();
        match format {
            Some(Format::Edf) | None => read_edf(&args.input, Some(&labels))
                .with_context(|| format!("reading {}", args.input.display()))?,
            Some(other) => bail!("--channels only applies to EDF input, not {other:?}"),
        }
    } else {
        read_recording(&args.input, format)
            .with_context(|| format!("reading {}", args.input.display()))?
    };
    Ok(rec)
}

fn load_matrix(path: &Path) -> anyhow::Result<RealMatrix> {
    let rec = read_recording(path, None)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(rec.data)
}

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let (m, n) = (args.channels, args.sources);
    if n == 0 || m < n {
        bail!("need channels >= sources >= 1 for a full-column-rank mixing (got {m} channels, {n} sources)");
    }
    let spec = if let Some(phis) = &args.ar1 {
        SourceSpec {
            kinds: parse_list(phis, "AR coefficient")?
                .into_iter()
                .map(|phi| sobi::SourceKind::Ar1 { phi })
                .collect(),
            sample_rate_hz: args.sample_rate,
        }
    } else if let Some(freqs) = &args.freqs {
        SourceSpec::sinusoids(&parse_list(freqs, "frequency")?, args.sample_rate)
    } else {
        default_spec(&args.source_kind, n, args.sample_rate)?
    };
    if spec.len() != n {
        bail!("{} source parameters given for {n} sources", spec.len());
    }

    let sources = generate_sources(&spec, args.samples, args.seed)?;
    let mixing = mixing_matrix(m, n, args.seed);
    let truth = GroundTruth::new(mixing, sources, args.noise, args.seed)?;
    let mut mixed = mix(&truth)?;
    mixed.sample_rate_hz = args.sample_rate;

    std::fs::create_dir_all(&args.out_dir)?;
    let format: Format = args.format.parse()?;
    let mixed_path = match format {
        Format::Csv => {
            let p = args.out_dir.join("mixed.csv");
            write_csv(&mixed, &p)?;
            p
        }
        Format::Bss1 => {
            let p = args.out_dir.join("mixed.bss1");
            write_bin(&mixed.data, &p)?;
            p
        }
        Format::Edf => bail!("gen does not write EDF; use csv or bss1"),
    };
    let mixing_path = args.out_dir.join("mixing.bss1");
    let sources_path = args.out_dir.join("sources.bss1");
    write_bin(&truth.mixing, &mixing_path)?;
    write_bin(&truth.sources, &sources_path)?;

    println!(
        "wrote {} ({}x{}), {} ({}x{}), {} ({}x{})",
        mixed_path.display(),
        m,
        args.samples,
        mixing_path.display(),
        m,
        n,
        sources_path.display(),
        n,
        args.samples
    );
    Ok(())
}

fn default_spec(kind: &str, n: usize, sample_rate: f64) -> anyhow::Result<SourceSpec> {
    match kind {
        "sine" => {
            let lo = 0.05 * sample_rate;
            let hi = 0.45 * sample_rate;
            let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
            let freqs: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            Ok(SourceSpec::sinusoids(&freqs, sample_rate))
        }
        "ar1" => {
            let (lo, hi) = if n <= 10 { (0.5, 0.95) } else { (-0.95, 0.95) };
            let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
            if n > 1 && step < 0.05 {
                bail!("cannot place {n} AR coefficients with pairwise gap 0.05; use --source-kind sine");
            }
            let phis: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
            Ok(SourceSpec::ar1(&phis))
        }
        other => bail!("unknown source kind {other:?}"),
    }
}

/// Random orthonormal columns: square when m == n, otherwise the first n
/// columns of a random m x m orthogonal matrix.
fn mixing_matrix(m: usize, n: usize, seed: u64) -> RealMatrix {
    let full = random_orthogonal(m, seed.wrapping_add(0x5eed));
    if m == n {
        return full;
    }
    let mut a = RealMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a.set(i, j, full.get(i, j));
        }
    }
    a
}

fn cmd_separate(args: SeparateArgs) -> anyhow::Result<()> {
    let rec = load_recording(&args.input)?;
    let method: Method = args.method.parse()?;
    let config = pipeline_config(&args.pipeline)?;
    let result = separate(&rec, method, &config)?;

    std::fs::create_dir_all(&args.out_dir)?;
    write_bin(&result.sources_hat, &args.out_dir.join("sources_hat.bss1"))?;
    write_bin(&result.mixing_hat, &args.out_dir.join("mixing_hat.bss1"))?;
    write_bin(&result.u, &args.out_dir.join("u.bss1"))?;
    write_bin(&result.w, &args.out_dir.join("w.bss1"))?;

    let d = &result.diagnostics;
    let mut report = String::new();
    report.push_str("schema = \"sobi-separate/1\"\n");
    report.push_str(&format!("method = \"{method}\"\n"));
    report.push_str(&format!("n = {}\n", d.n));
    report.push_str(&format!("sigma2 = {:e}\n", d.sigma2));
    report.push_str(&format!("wall_s = {:e}\n", result.wall_time.as_secs_f64()));
    report.push_str(&format!("final_off = {:e}\n", d.final_off));
    if let Some(sweeps) = d.sweeps {
        report.push_str(&format!("sweeps = {sweeps}\n"));
    }
    if let Some(eigengap) = d.eigengap {
        report.push_str(&format!("eigengap = {eigengap:e}\n"));
    }
    if let Some(lag) = d.selected_lag {
        report.push_str(&format!("selected_lag = {lag}\n"));
    }
    report.push_str(&format!("min_diag_gap = {:e}\n", d.min_diag_gap));
    report.push_str(&format!(
        "lags = \"{}..{}\"\n",
        d.lags.first().unwrap_or(&0),
        d.lags.last().unwrap_or(&0)
    ));
    report.push_str("preprocessing = \"per-channel mean removal\"\n");
    std::fs::write(args.out_dir.join("report.toml"), report)?;

    println!(
        "method={method} n={} wall_s={:.6} final_off={:.3e}",
        d.n,
        result.wall_time.as_secs_f64(),
        d.final_off
    );
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> anyhow::Result<()> {
    let rec = load_recording(&args.input)?;
    let config = pipeline_config(&args.pipeline)?;
    let truth = match (&args.truth_mixing, &args.truth_sources) {
        (Some(a), Some(s)) => Some(GroundTruth::new(
            load_matrix(a)?,
            load_matrix(s)?,
            0.0,
            0,
        )?),
        (None, None) => None,
        _ => bail!("--truth-mixing and --truth-sources must be given together"),
    };
    let label = args.input.input.display().to_string();
    let report = bench(&rec, &config, args.repeats, truth.as_ref(), &label)?;

    println!("{:<8} {:>12} {:>9}", "method", "median_s", "speedup");
    for r in &report.results {
        let speedup = match r.method {
            Method::Givens => 1.0,
            Method::Schur => report.speedup,
        };
        println!("{:<8} {:>12.6} {:>9.2}", r.method.to_string(), r.median_s, speedup);
    }
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_toml())?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> anyhow::Result<()> {
    let estimated = load_matrix(&args.estimated)?;
    let truth = load_matrix(&args.truth)?;
    let mc = matched_correlation(&truth, &estimated)?;
    for p in &mc.pairs {
        println!(
            "estimated {} <-> true {}: |r| = {:.6}",
            p.estimated, p.reference, p.r
        );
    }
    println!(
        "matched_corr_min = {:.6}\nmatched_corr_mean = {:.6}",
        mc.min_abs_r(),
        mc.mean_abs_r()
    );

    match (&args.u, &args.w, &args.mixing) {
        (Some(u), Some(w), Some(a)) => {
            let u = load_matrix(u)?;
            let w = load_matrix(w)?;
            let a = load_matrix(a)?;
            let gain = u.matmul_transa(&w.matmul(&a)?)?;
            println!("amari = {:.6}", amari_index(&gain)?);
        }
        (None, None, None) => {}
        _ => bail!("--u, --w and --mixing must be given together for the amari index"),
    }
    Ok(())
}
