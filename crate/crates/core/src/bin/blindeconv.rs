//! Command-line front end: simulate preset data, estimate from a CSV series,
//! run replicated benchmarks from a JSON config, and profile the determinant
//! criterion over a noise grid.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use blindeconv::bench::{
    emit_g_curve, emit_scatter, g_curve, run_monte_carlo, sigma_grid, ExperimentConfig, Preset,
    RunStatus,
};
use blindeconv::asymptotics::plug_in_covariance;
use blindeconv::bench::recover_distribution;
use blindeconv::estimator::{estimate, EstimationResult, RootSearchConfig};
use blindeconv::model::simulate_model;
use blindeconv::moments::FilterSpec;
use blindeconv::recovery::{AlphabetEstimate, WeightEstimate};
use blindeconv::rng::stream_rng;
use blindeconv::ComplexSeries;

#[derive(Parser)]
#[command(
    name = "blindeconv",
    version,
    about = "Noise-level and inverse-filter estimation for discrete complex sources"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate observations from a named preset and write them as CSV.
    Simulate(SimulateArgs),
    /// Fit noise level, filter, and source distribution to a CSV series.
    Estimate(EstimateArgs),
    /// Run a replicated Monte Carlo experiment described by a JSON config.
    Bench(BenchArgs),
    /// Tabulate the criterion J and its log compression G over a sigma grid.
    Gcurve(GcurveArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PresetArg {
    Mixture,
    Ar2,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Preset {
        match p {
            PresetArg::Mixture => Preset::Mixture,
            PresetArg::Ar2 => Preset::Ar2,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Data-generating scenario.
    #[arg(long, value_enum)]
    preset: PresetArg,
    /// True noise scale.
    #[arg(long, default_value_t = 0.05)]
    sigma0: f64,
    /// Number of observations.
    #[arg(long, default_value_t = 2000)]
    n: usize,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path (`-` for stdout).
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Input CSV series (`t,re,im` rows).
    #[arg(long, short)]
    input: PathBuf,
    /// Assumed alphabet size.
    #[arg(long)]
    p: usize,
    /// Half-width of the deconvolution window.
    #[arg(long, default_value_t = 1)]
    kn: usize,
    /// Ceiling of the noise-level scan (defaults to a data-driven value).
    #[arg(long)]
    sigma_max: Option<f64>,
    /// Number of random search starts.
    #[arg(long, default_value_t = 6)]
    starts: usize,
    /// Seed of the search RNG.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Root bracketing tolerance (the simplex runs one decade tighter).
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Also compute the plug-in covariance of (sigma, filter).
    #[arg(long)]
    with_cov: bool,
    /// Output JSON path (stdout when omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// JSON experiment configuration.
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides the config's artifact directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GcurveArgs {
    /// Input CSV series (`t,re,im` rows).
    #[arg(long, short)]
    input: PathBuf,
    /// Assumed alphabet size.
    #[arg(long)]
    p: usize,
    /// Half-width of the filter window.
    #[arg(long, default_value_t = 1)]
    kn: usize,
    /// Comma-separated filter coefficients, length `2*kn + 1`
    /// (defaults to the centered identity tap).
    #[arg(long)]
    xi: Option<String>,
    /// Largest noise level of the grid.
    #[arg(long, default_value_t = 1.0)]
    sigma_max: f64,
    /// Number of grid steps.
    #[arg(long, default_value_t = 100)]
    steps: usize,
    /// Output CSV path.
    #[arg(long, short)]
    output: PathBuf,
    /// Optional SVG line-plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// JSON document produced by `estimate`.
#[derive(Serialize)]
struct EstimateReport {
    estimate: EstimationResult,
    alphabet: Option<AlphabetEstimate>,
    weights: Option<WeightEstimate>,
    /// Why distribution recovery was skipped, when it errored.
    recovery_error: Option<String>,
    covariance: Option<CovarianceSummary>,
}

/// Serializable subset of the plug-in covariance report.
#[derive(Serialize)]
struct CovarianceSummary {
    sigma_std: f64,
    filter_std: Vec<f64>,
    /// Estimated slope of the criterion in sigma at the root (negated).
    alpha_hat: f64,
    negative_alpha: bool,
    s_squared: f64,
    bandwidth: usize,
    hessian_cond: f64,
    /// Row-major asymptotic covariance of (filter coefficients…, sigma).
    cov: Vec<Vec<f64>>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> blindeconv::Result<ExitCode> {
    match cli.cmd {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Estimate(args) => cmd_estimate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Gcurve(args) => cmd_gcurve(args),
    }
}

fn cmd_simulate(args: SimulateArgs) -> blindeconv::Result<ExitCode> {
    let cfg = ExperimentConfig {
        preset: args.preset.into(),
        sigma0: args.sigma0,
        n: args.n,
        kn: 1,
        replications: 1,
        seed: args.seed,
        search: RootSearchConfig::default(),
        output_dir: None,
    };
    let model = cfg.model_config();
    model.validate()?;
    let mut rng = stream_rng(args.seed, 0);
    let y = simulate_model(&model, &mut rng)?;
    if args.output.as_os_str() == "-" {
        y.write_csv(io::stdout().lock())?;
    } else {
        y.write_csv(fs::File::create(&args.output)?)?;
        eprintln!("wrote {} samples to {}", y.len(), args.output.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(args: EstimateArgs) -> blindeconv::Result<ExitCode> {
    let y = ComplexSeries::read_csv(fs::File::open(&args.input)?)?;
    let cfg = RootSearchConfig {
        sigma_max: args.sigma_max,
        n_starts: args.starts,
        bisect_tol: args.tol,
        simplex_tol: args.tol / 10.0,
        ..Default::default()
    };
    let mut rng = stream_rng(args.seed, 0);
    let est = estimate(&y, args.kn, args.p, &cfg, &mut rng)?;

    let (alphabet, weights, recovery_error) = match recover_distribution(&y, &est) {
        Ok((a, w)) => (Some(a), Some(w), None),
        Err(e) => (None, None, Some(e.to_string())),
    };

    let covariance = if args.with_cov {
        let report = plug_in_covariance(&y, &est)?;
        let d = report.cov.nrows();
        Some(CovarianceSummary {
            sigma_std: report.sigma_std(),
            filter_std: (0..d - 1).map(|i| report.xi_std(i)).collect(),
            alpha_hat: report.alpha_hat,
            negative_alpha: report.negative_alpha,
            s_squared: report.s_squared,
            bandwidth: report.bandwidth,
            hessian_cond: report.hessian_cond,
            cov: (0..d)
                .map(|r| (0..d).map(|c| report.cov[(r, c)]).collect())
                .collect(),
        })
    } else {
        None
    };

    let report = EstimateReport { estimate: est, alphabet, weights, recovery_error, covariance };
    let text = serde_json::to_string_pretty(&report)
        .map_err(|e| blindeconv::Error::Parse(e.to_string()))?;
    match &args.output {
        Some(path) => fs::write(path, text + "\n")?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.write_all(b"\n")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> blindeconv::Result<ExitCode> {
    let text = fs::read_to_string(&args.config)?;
    let mut cfg: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| blindeconv::Error::Parse(e.to_string()))?;
    if let Some(dir) = args.output_dir {
        cfg.output_dir = Some(dir);
    }
    let summary = run_monte_carlo(&cfg)?;

    // Human-readable digest on stdout.
    println!(
        "replications: {} kept, {} eliminated, {} failed",
        summary.n_used(),
        summary.n_eliminated,
        summary.n_failed
    );
    for p in &summary.params {
        let std = p.std.map(|s| format!("{s:.4}")).unwrap_or_else(|| "-".into());
        println!("  {:<10} mean {:+.4}{:+.4}i  std {}", p.name, p.mean.re, p.mean.im, std);
    }

    if let Some(dir) = &cfg.output_dir {
        let json = serde_json::to_string_pretty(&summary)
            .map_err(|e| blindeconv::Error::Parse(e.to_string()))?;
        fs::write(dir.join("summary.json"), json + "\n")?;
        emit_first_run_scatter(&cfg, &summary, dir)?;
        println!("artifacts in {}", dir.display());
    }

    if summary.any_hard_failure() {
        Ok(ExitCode::FAILURE)
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

/// Re-simulates the first kept replication (streams are deterministic) and
/// plots its observations against true and recovered support points.
fn emit_first_run_scatter(
    cfg: &ExperimentConfig,
    summary: &blindeconv::bench::McSummary,
    dir: &std::path::Path,
) -> blindeconv::Result<()> {
    let Some(rec) = summary.runs.iter().find(|r| r.status == RunStatus::Ok) else {
        return Ok(());
    };
    let model = cfg.model_config();
    let mut rng = stream_rng(cfg.seed, blindeconv::rng::sim_stream(rec.rep as u64));
    let y = simulate_model(&model, &mut rng)?;
    let est = AlphabetEstimate {
        points: rec.points.clone().expect("kept run has points"),
        eigvec: Vec::new(),
        min_eigenvalue: f64::NAN,
    };
    emit_scatter(&y, &model.dist, &est, &dir.join("scatter.svg"))
}

fn cmd_gcurve(args: GcurveArgs) -> blindeconv::Result<ExitCode> {
    let y = ComplexSeries::read_csv(fs::File::open(&args.input)?)?;
    let window = 2 * args.kn + 1;
    let xi = match &args.xi {
        Some(text) => {
            let parsed: std::result::Result<Vec<f64>, _> =
                text.split(',').map(|s| s.trim().parse::<f64>()).collect();
            parsed.map_err(|e| blindeconv::Error::Parse(format!("bad --xi: {e}")))?
        }
        None => {
            let mut v = vec![0.0; window];
            v[args.kn] = 1.0;
            v
        }
    };
    let spec = FilterSpec::fir(args.kn, xi)?;
    let grid = sigma_grid(args.sigma_max, args.steps)?;
    let points = g_curve(&spec, &y, args.p, &grid)?;
    emit_g_curve(&points, &args.output, args.svg.as_deref())?;
    eprintln!(
        "wrote {} grid points to {}{}",
        points.len(),
        args.output.display(),
        args.svg
            .as_ref()
            .map(|s| format!(" and {}", s.display()))
            .unwrap_or_default()
    );
    Ok(ExitCode::SUCCESS)
}
