//! Monte Carlo benchmark harness.
//!
//! Runs replicated simulate → estimate → recover pipelines under a named
//! preset, with one RNG stream pair per replication so results are identical
//! regardless of worker count, then aggregates parameter estimates into a
//! mean/std table. Runs whose recovered mixture weights contain a negative
//! entry are *eliminated*: they are reported but excluded from the averages.
//! Runs where every search start failed are counted separately as *failed*.
//!
//! Artifact emitters (CSV tables, per-run logs, scatter and criterion-curve
//! SVG plots) live here as well so the CLI stays a thin argument parser.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deconv::{g_transform, hankel_matrix, pseudo_moments, CriterionSlice};
use crate::dist::DiscreteComplexDist;
use crate::error::{Error, Result};
use crate::estimator::{align_dominant_first, estimate, EstimationResult, RootSearchConfig};
use crate::model::{ar2_config, ar2_theta, mixture_config, ModelConfig, simulate_model};
use crate::moments::FilterSpec;
use crate::recovery::{canonical_sort, support_points, weights, AlphabetEstimate};
use crate::rng::{search_stream, sim_stream, stream_rng};
use crate::series::ComplexSeries;
use crate::svg::{Bounds, SvgPlot};
use crate::Complex64;

/// Desk-scale default replication count; raise to 100 for full-size tables.
pub const DEFAULT_REPLICATIONS: usize = 20;

fn default_replications() -> usize {
    DEFAULT_REPLICATIONS
}

/// Named data-generating scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Three-point complex alphabet observed through an identity channel.
    Mixture,
    /// Same alphabet pushed through the inverse of a length-3 real filter,
    /// i.e. the observations follow a second-order autoregression.
    Ar2,
}

/// Full description of one benchmark experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub preset: Preset,
    /// True noise scale of the simulated observations.
    pub sigma0: f64,
    /// Observations per replication.
    pub n: usize,
    /// Half-width of the deconvolution window (window length `2*kn + 1`).
    pub kn: usize,
    #[serde(default = "default_replications")]
    pub replications: usize,
    /// Master seed; every replication derives its own streams from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub search: RootSearchConfig,
    /// Artifact directory. Nothing is written when absent.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::invalid("replications must be at least 1"));
        }
        self.model_config().validate()
    }

    /// The data-generating process behind the preset.
    pub fn model_config(&self) -> ModelConfig {
        match self.preset {
            Preset::Mixture => mixture_config(self.sigma0, self.n),
            Preset::Ar2 => ar2_config(self.sigma0, self.n),
        }
    }

    /// Alphabet size assumed by the estimation side (matches the preset).
    pub fn alphabet_size(&self) -> usize {
        self.model_config().dist.points().len()
    }

    /// True parameter values in reporting order, for error tables.
    pub fn truth(&self) -> Truth {
        let model = self.model_config();
        let window = 2 * self.kn + 1;
        let mut theta = vec![0.0; window];
        match self.preset {
            Preset::Mixture => theta[0] = 1.0,
            Preset::Ar2 => {
                for (i, c) in ar2_theta().iter().enumerate().take(window) {
                    theta[i] = c.re;
                }
            }
        }
        let (points, weights) = sorted_support(&model.dist);
        Truth { theta, points, weights }
    }
}

/// True parameters arranged exactly like the estimate vectors: filter taps
/// dominant-first, support points in canonical order, weights matched to the
/// sorted points.
#[derive(Debug, Clone)]
pub struct Truth {
    pub theta: Vec<f64>,
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

/// Support points in canonical order with their weights carried along.
fn sorted_support(dist: &DiscreteComplexDist) -> (Vec<Complex64>, Vec<f64>) {
    let sorted = canonical_sort(dist.points().to_vec());
    let weights = sorted
        .iter()
        .map(|s| {
            let i = dist
                .points()
                .iter()
                .position(|p| p == s)
                .expect("sorted point originates from the distribution");
            dist.weights()[i]
        })
        .collect();
    (sorted, weights)
}

/// How a single replication ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    /// Full pipeline succeeded with non-negative weights.
    Ok,
    /// Pipeline succeeded but a recovered weight was negative; excluded from
    /// the aggregates.
    Eliminated,
    /// Estimation or recovery errored; excluded and counted separately.
    Failed,
}

/// Everything recorded about one replication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub rep: usize,
    pub status: RunStatus,
    /// Populated unless the run failed.
    pub sigma_hat: Option<f64>,
    /// Unit-norm filter estimate shifted so the dominant tap leads.
    pub theta_aligned: Option<Vec<f64>>,
    /// Recovered support points in canonical order.
    pub points: Option<Vec<Complex64>>,
    /// Recovered weights matched to `points`.
    pub weights: Option<Vec<f64>>,
    pub j_residual: Option<f64>,
    pub converged: Option<bool>,
    /// Error message of a failed run.
    pub error: Option<String>,
}

/// Mean and dispersion of one reported parameter across kept runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamSummary {
    pub name: String,
    pub mean: Complex64,
    /// `sqrt( sum |x - mean|^2 / (m-1) )`; absent when fewer than two runs
    /// were kept.
    pub std: Option<f64>,
}

/// Aggregated outcome of a Monte Carlo experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McSummary {
    pub config: ExperimentConfig,
    pub params: Vec<ParamSummary>,
    pub n_requested: usize,
    /// Runs dropped for a negative recovered weight.
    pub n_eliminated: usize,
    /// Runs dropped because estimation or recovery errored.
    pub n_failed: usize,
    pub runs: Vec<RunRecord>,
}

impl McSummary {
    /// Number of runs entering the mean/std columns.
    pub fn n_used(&self) -> usize {
        self.n_requested - self.n_eliminated - self.n_failed
    }

    pub fn param(&self, name: &str) -> Option<&ParamSummary> {
        self.params.iter().find(|p| p.name == name)
    }

    /// True when any replication errored outright (eliminations are an
    /// expected outcome, not a hard failure).
    pub fn any_hard_failure(&self) -> bool {
        self.n_failed > 0
    }
}

/// Runs the full experiment: replications in parallel, each seeded from the
/// master seed by its index, then a deterministic sequential aggregation.
/// When `output_dir` is set, the summary table and per-run log are written
/// there as CSV.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<McSummary> {
    cfg.validate()?;
    let model = cfg.model_config();
    let p = cfg.alphabet_size();

    let runs: Vec<RunRecord> = (0..cfg.replications)
        .into_par_iter()
        .map(|rep| run_one(cfg, &model, p, rep))
        .collect();

    let n_eliminated = runs.iter().filter(|r| r.status == RunStatus::Eliminated).count();
    let n_failed = runs.iter().filter(|r| r.status == RunStatus::Failed).count();
    let params = summarize(&runs, 2 * cfg.kn + 1, p);

    let summary = McSummary {
        config: cfg.clone(),
        params,
        n_requested: cfg.replications,
        n_eliminated,
        n_failed,
        runs,
    };

    if let Some(dir) = &cfg.output_dir {
        fs::create_dir_all(dir)?;
        emit_table(&summary, &dir.join("summary.csv"))?;
        emit_runs(&summary, &dir.join("runs.csv"))?;
    }
    Ok(summary)
}

/// One replication: simulate with the `sim` stream, search with the `search`
/// stream, then recover the alphabet and weights at the optimum.
fn run_one(cfg: &ExperimentConfig, model: &ModelConfig, p: usize, rep: usize) -> RunRecord {
    match run_one_inner(cfg, model, p, rep) {
        Ok(rec) => rec,
        Err(e) => RunRecord {
            rep,
            status: RunStatus::Failed,
            sigma_hat: None,
            theta_aligned: None,
            points: None,
            weights: None,
            j_residual: None,
            converged: None,
            error: Some(e.to_string()),
        },
    }
}

fn run_one_inner(
    cfg: &ExperimentConfig,
    model: &ModelConfig,
    p: usize,
    rep: usize,
) -> Result<RunRecord> {
    let mut sim_rng = stream_rng(cfg.seed, sim_stream(rep as u64));
    let y = simulate_model(model, &mut sim_rng)?;

    let mut search_rng = stream_rng(cfg.seed, search_stream(rep as u64));
    let est = estimate(&y, cfg.kn, p, &cfg.search, &mut search_rng)?;
    let (alpha, w) = recover_distribution(&y, &est)?;

    let negative = w.negative_flag;
    Ok(RunRecord {
        rep,
        status: if negative { RunStatus::Eliminated } else { RunStatus::Ok },
        sigma_hat: Some(est.sigma_hat),
        theta_aligned: Some(align_dominant_first(&est.theta_hat)),
        points: Some(alpha.points),
        weights: Some(w.weights),
        j_residual: Some(est.j_residual),
        converged: Some(est.converged),
        error: None,
    })
}

/// Alphabet and weight recovery at a fitted noise level and filter.
///
/// Uses the *normalized* filter (unit norm, dominant tap positive), not the
/// raw search optimum: the criterion cannot tell `xi` from `-xi`, so the raw
/// coefficients carry an arbitrary sign that would negate the recovered
/// alphabet. Normalizing first pins filter and alphabet to the same gauge.
pub fn recover_distribution(
    y: &ComplexSeries,
    est: &EstimationResult,
) -> Result<(AlphabetEstimate, crate::recovery::WeightEstimate)> {
    let spec = FilterSpec::fir(est.half_width, est.theta_hat.clone())?;
    let slice = CriterionSlice::from_observations(&spec, y, est.p)?;
    let d_tilde = pseudo_moments(&slice.d_n, est.sigma_hat, slice.norm)?;
    let matrix = hankel_matrix(&d_tilde);
    let alpha = support_points(&matrix)?;
    let w = weights(&d_tilde, &alpha.points)?;
    Ok((alpha, w))
}

/// Deterministic cascade summation: splits recursively instead of folding
/// left to right, so long averages keep full precision in any run order.
fn pairwise_sum(xs: &[Complex64]) -> Complex64 {
    match xs.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

/// Mean/std table over the kept runs, iterated in replication order.
fn summarize(runs: &[RunRecord], window: usize, p: usize) -> Vec<ParamSummary> {
    let mut names = Vec::new();
    for i in 0..window {
        names.push(format!("theta_{i}"));
    }
    names.push("sigma".to_string());
    for i in 1..=p {
        names.push(format!("a_{i}"));
    }
    for i in 1..=p {
        names.push(format!("pi_{i}"));
    }

    // One value column per parameter, rows in replication order.
    let mut columns: Vec<Vec<Complex64>> = vec![Vec::new(); names.len()];
    let mut kept: Vec<&RunRecord> = runs.iter().filter(|r| r.status == RunStatus::Ok).collect();
    kept.sort_by_key(|r| r.rep);
    for rec in kept {
        let theta = rec.theta_aligned.as_ref().expect("kept run has estimates");
        let points = rec.points.as_ref().expect("kept run has estimates");
        let ws = rec.weights.as_ref().expect("kept run has estimates");
        let mut col = 0;
        for &t in theta {
            columns[col].push(Complex64::new(t, 0.0));
            col += 1;
        }
        columns[col].push(Complex64::new(rec.sigma_hat.unwrap(), 0.0));
        col += 1;
        for &a in points {
            columns[col].push(a);
            col += 1;
        }
        for &w in ws {
            columns[col].push(Complex64::new(w, 0.0));
            col += 1;
        }
    }

    names
        .into_iter()
        .zip(columns)
        .map(|(name, xs)| {
            let m = xs.len();
            if m == 0 {
                return ParamSummary { name, mean: Complex64::new(f64::NAN, f64::NAN), std: None };
            }
            let mean = pairwise_sum(&xs) / m as f64;
            let std = if m >= 2 {
                let sq: Vec<Complex64> =
                    xs.iter().map(|x| Complex64::new((x - mean).norm_sqr(), 0.0)).collect();
                Some((pairwise_sum(&sq).re / (m as f64 - 1.0)).sqrt())
            } else {
                None
            };
            ParamSummary { name, mean, std }
        })
        .collect()
}

/// Formats a float with Rust's shortest round-trip representation; emitted
/// bytes are a pure function of the value, which keeps tables bit-stable.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Writes the `parameter,mean_re,mean_im,std` table.
pub fn emit_table(summary: &McSummary, path: &Path) -> Result<()> {
    let mut out = String::from("parameter,mean_re,mean_im,std\n");
    for p in &summary.params {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.name,
            fmt_f64(p.mean.re),
            fmt_f64(p.mean.im),
            fmt_opt(p.std)
        ));
    }
    out.push_str(&format!("n_used,{},0,\n", summary.n_used()));
    out.push_str(&format!("n_eliminated,{},0,\n", summary.n_eliminated));
    out.push_str(&format!("n_failed,{},0,\n", summary.n_failed));
    write_atomic(path, out.as_bytes())
}

/// Writes one CSV row per replication, blank cells for unavailable values.
pub fn emit_runs(summary: &McSummary, path: &Path) -> Result<()> {
    let window = 2 * summary.config.kn + 1;
    let p = summary.config.alphabet_size();
    let mut header = String::from("rep,status,converged,sigma_hat,j_residual");
    for i in 0..window {
        header.push_str(&format!(",theta_{i}"));
    }
    for i in 1..=p {
        header.push_str(&format!(",a_{i}_re,a_{i}_im"));
    }
    for i in 1..=p {
        header.push_str(&format!(",pi_{i}"));
    }
    header.push_str(",error\n");

    let mut out = header;
    for r in &summary.runs {
        let status = match r.status {
            RunStatus::Ok => "ok",
            RunStatus::Eliminated => "eliminated",
            RunStatus::Failed => "failed",
        };
        let converged =
            r.converged.map(|c| if c { "true" } else { "false" }).unwrap_or_default();
        let mut row = format!(
            "{},{},{},{},{}",
            r.rep,
            status,
            converged,
            fmt_opt(r.sigma_hat),
            fmt_opt(r.j_residual)
        );
        for i in 0..window {
            let v = r.theta_aligned.as_ref().map(|t| t[i]);
            row.push_str(&format!(",{}", fmt_opt(v)));
        }
        for i in 0..p {
            let v = r.points.as_ref().map(|a| a[i]);
            row.push_str(&format!(
                ",{},{}",
                fmt_opt(v.map(|c| c.re)),
                fmt_opt(v.map(|c| c.im))
            ));
        }
        for i in 0..p {
            let v = r.weights.as_ref().map(|w| w[i]);
            row.push_str(&format!(",{}", fmt_opt(v)));
        }
        // Commas inside error text would break the row structure.
        let err = r.error.as_deref().unwrap_or("").replace(',', ";");
        row.push_str(&format!(",{err}\n"));
        out.push_str(&row);
    }
    write_atomic(path, out.as_bytes())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

/// Complex-plane scatter of the observations with the true support points
/// (crosses) and their estimates (squares) overlaid.
pub fn emit_scatter(
    y: &ComplexSeries,
    truth: &DiscreteComplexDist,
    est: &AlphabetEstimate,
    path: &Path,
) -> Result<()> {
    let pts = y
        .samples()
        .iter()
        .chain(truth.points())
        .chain(&est.points)
        .map(|c| (c.re, c.im));
    let bounds = Bounds::fit(pts)
        .ok_or_else(|| Error::invalid("scatter input contains no finite points"))?
        .padded(0.08);
    let mut plot = SvgPlot::new(640.0, 640.0, bounds);
    plot.frame();
    for c in y.samples() {
        plot.circle(c.re, c.im, 1.5, "#9ec5e8");
    }
    for c in truth.points() {
        plot.cross(c.re, c.im, 7.0, "#1f4e9c");
    }
    for c in &est.points {
        plot.square(c.re, c.im, 7.0, "#c02020");
    }
    plot.label("observations / true support (x) / estimates ([])");
    write_atomic(path, plot.finish().as_bytes())
}

/// One evaluation point of the criterion profile in `sigma`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GCurvePoint {
    pub sigma: f64,
    /// Raw criterion value (real part of the matrix determinant).
    pub j: f64,
    /// Log-compressed value `sign(j) * log(|j| + 1)`.
    pub g: f64,
}

/// Profiles the criterion over a noise-level grid for a fixed filter.
pub fn g_curve(
    spec: &FilterSpec,
    y: &ComplexSeries,
    p: usize,
    grid: &[f64],
) -> Result<Vec<GCurvePoint>> {
    if grid.is_empty() {
        return Err(Error::invalid("sigma grid must be nonempty"));
    }
    let slice = CriterionSlice::from_observations(spec, y, p)?;
    Ok(grid
        .iter()
        .map(|&sigma| {
            let j = slice.j(sigma);
            GCurvePoint { sigma, j, g: g_transform(j) }
        })
        .collect())
}

/// Writes the `sigma,J,G` table and, optionally, a line plot of `G`.
pub fn emit_g_curve(points: &[GCurvePoint], csv: &Path, svg: Option<&Path>) -> Result<()> {
    if points.is_empty() {
        return Err(Error::invalid("no curve points to emit"));
    }
    let mut out = String::from("sigma,J,G\n");
    for pt in points {
        out.push_str(&format!(
            "{},{},{}\n",
            fmt_f64(pt.sigma),
            fmt_f64(pt.j),
            fmt_f64(pt.g)
        ));
    }
    write_atomic(csv, out.as_bytes())?;

    if let Some(svg_path) = svg {
        let xy: Vec<(f64, f64)> = points.iter().map(|pt| (pt.sigma, pt.g)).collect();
        let bounds = Bounds::fit(xy.iter().copied().chain([(xy[0].0, 0.0)]))
            .ok_or_else(|| Error::invalid("curve contains non-finite values"))?
            .padded(0.08);
        let mut plot = SvgPlot::new(640.0, 420.0, bounds);
        plot.frame();
        plot.polyline(&xy, "#c02020");
        plot.label("log-compressed criterion vs sigma");
        write_atomic(svg_path, plot.finish().as_bytes())?;
    }
    Ok(())
}

/// Uniform grid of `steps + 1` levels on `[0, sigma_max]`.
pub fn sigma_grid(sigma_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(sigma_max > 0.0) || steps == 0 {
        return Err(Error::invalid("sigma grid needs sigma_max > 0 and at least one step"));
    }
    Ok((0..=steps).map(|i| sigma_max * i as f64 / steps as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn small_cfg(preset: Preset, sigma0: f64, n: usize, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            preset,
            sigma0,
            n,
            kn: 1,
            replications: reps,
            seed: 7,
            search: RootSearchConfig { n_starts: 3, max_iters: 200, ..Default::default() },
            output_dir: None,
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = small_cfg(Preset::Mixture, 0.05, 500, 4);
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.preset, Preset::Mixture);
        assert_eq!(back.n, 500);
        assert_eq!(back.replications, 4);
    }

    #[test]
    fn config_defaults_fill_missing_fields() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"preset":"ar2","sigma0":0.05,"n":1000,"kn":1}"#,
        )
        .unwrap();
        assert_eq!(cfg.replications, DEFAULT_REPLICATIONS);
        assert_eq!(cfg.seed, 0);
        assert!(cfg.output_dir.is_none());
        assert_eq!(cfg.search.grid_steps, RootSearchConfig::default().grid_steps);
    }

    #[test]
    fn zero_replications_rejected() {
        let cfg = small_cfg(Preset::Mixture, 0.05, 500, 0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn truth_orders_support_canonically() {
        let cfg = small_cfg(Preset::Mixture, 0.05, 500, 1);
        let truth = cfg.truth();
        assert_eq!(truth.theta, vec![1.0, 0.0, 0.0]);
        assert_eq!(truth.points[0], Complex64::new(4.0, 1.0));
        assert_eq!(truth.points[1], Complex64::new(-1.0, 3.0));
        assert_eq!(truth.points[2], Complex64::new(-2.0, -1.0));
        assert_eq!(truth.weights, vec![0.6, 0.25, 0.15]);
    }

    #[test]
    fn ar2_truth_pads_to_window() {
        let mut cfg = small_cfg(Preset::Ar2, 0.05, 500, 1);
        cfg.kn = 2;
        let truth = cfg.truth();
        assert_eq!(truth.theta.len(), 5);
        assert!((truth.theta[0] - 6.0 / 7.0).abs() < 1e-15);
        assert!((truth.theta[2] - 3.0 / 7.0).abs() < 1e-15);
        assert_eq!(truth.theta[3], 0.0);
        assert_eq!(truth.theta[4], 0.0);
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<Complex64> =
            (0..101).map(|i| Complex64::new(i as f64 * 0.1, -(i as f64) * 0.03)).collect();
        let naive: Complex64 = xs.iter().sum();
        let pair = pairwise_sum(&xs);
        assert!((naive - pair).norm() < 1e-9);
        assert_eq!(pairwise_sum(&[]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn small_mixture_run_aggregates_and_writes() {
        let dir = tempdir().unwrap();
        let mut cfg = small_cfg(Preset::Mixture, 0.05, 600, 3);
        cfg.output_dir = Some(dir.path().to_path_buf());
        let summary = run_monte_carlo(&cfg).unwrap();
        assert_eq!(summary.n_requested, 3);
        assert_eq!(summary.n_failed + summary.n_eliminated + summary.n_used(), 3);
        assert!(summary.n_used() >= 1, "at least one replication should succeed");

        // Filter estimate should concentrate on the leading tap.
        let t0 = summary.param("theta_0").unwrap();
        assert!(t0.mean.re > 0.9, "theta_0 mean {}", t0.mean.re);
        let sigma = summary.param("sigma").unwrap();
        assert!(sigma.mean.re > 0.0 && sigma.mean.re < 0.5);

        assert!(dir.path().join("summary.csv").exists());
        assert!(dir.path().join("runs.csv").exists());
        let table = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert!(table.starts_with("parameter,mean_re,mean_im,std\n"));
        assert!(table.contains("a_1,"));
    }

    #[test]
    fn single_replication_reports_absent_std() {
        let cfg = small_cfg(Preset::Mixture, 0.02, 600, 1);
        let summary = run_monte_carlo(&cfg).unwrap();
        if summary.n_used() == 1 {
            let sigma = summary.param("sigma").unwrap();
            assert!(sigma.std.is_none(), "std must be absent for a single run");
            let run = &summary.runs[0];
            assert!((sigma.mean.re - run.sigma_hat.unwrap()).abs() < 1e-15);
        } else {
            // The lone run was eliminated or failed; the accounting must say so.
            assert_eq!(summary.n_used(), 0);
        }
    }

    #[test]
    fn summary_is_deterministic_across_runs() {
        let cfg = small_cfg(Preset::Mixture, 0.05, 500, 3);
        let a = run_monte_carlo(&cfg).unwrap();
        let b = run_monte_carlo(&cfg).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb, "identical configs must give identical summaries");
    }

    #[test]
    fn table_bytes_are_stable() {
        let dir = tempdir().unwrap();
        let cfg = small_cfg(Preset::Mixture, 0.05, 500, 2);
        let summary = run_monte_carlo(&cfg).unwrap();
        let p1 = dir.path().join("t1.csv");
        let p2 = dir.path().join("t2.csv");
        emit_table(&summary, &p1).unwrap();
        emit_table(&summary, &p2).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn runs_log_covers_every_replication() {
        let dir = tempdir().unwrap();
        let cfg = small_cfg(Preset::Mixture, 0.05, 500, 3);
        let summary = run_monte_carlo(&cfg).unwrap();
        let path = dir.path().join("runs.csv");
        emit_runs(&summary, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        // Header plus one row per replication.
        assert_eq!(text.lines().count(), 1 + cfg.replications);
        assert!(text.lines().next().unwrap().starts_with("rep,status,converged"));
    }

    #[test]
    fn scatter_smoke_test() {
        let dir = tempdir().unwrap();
        let cfg = small_cfg(Preset::Mixture, 0.05, 400, 1);
        let model = cfg.model_config();
        let mut rng = stream_rng(1, 0);
        let y = simulate_model(&model, &mut rng).unwrap();
        let est = AlphabetEstimate {
            points: model.dist.points().to_vec(),
            eigvec: vec![Complex64::new(0.0, 0.0); 4],
            min_eigenvalue: 0.0,
        };
        let path = dir.path().join("scatter.svg");
        emit_scatter(&y, &model.dist, &est, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
        assert!(text.contains("<circle"));
        assert!(text.contains("<rect"));
    }

    #[test]
    fn g_curve_sign_and_compression_invariants() {
        let cfg = small_cfg(Preset::Mixture, 0.3, 2000, 1);
        let model = cfg.model_config();
        let mut rng = stream_rng(5, 0);
        let y = simulate_model(&model, &mut rng).unwrap();
        let spec = FilterSpec::fir(1, vec![0.0, 1.0, 0.0]).unwrap();
        let grid = sigma_grid(1.0, 50).unwrap();
        let pts = g_curve(&spec, &y, 3, &grid).unwrap();

        assert_eq!(pts.len(), 51);
        // First grid level is zero noise removed: positive for generic data.
        assert!(pts[0].sigma == 0.0 && pts[0].j > 0.0);
        for pt in &pts {
            assert!((pt.g.abs() - (pt.j.abs() + 1.0).ln()).abs() < 1e-12);
            assert_eq!(pt.g.signum(), pt.j.signum());
        }
        // With the true filter and ample data the profile must cross zero.
        assert!(
            pts.iter().any(|pt| pt.j < 0.0),
            "criterion should change sign on [0, 1] for sigma0 = 0.3"
        );
    }

    #[test]
    fn g_curve_emission_round_trip() {
        let dir = tempdir().unwrap();
        let pts = vec![
            GCurvePoint { sigma: 0.0, j: 3.0, g: g_transform(3.0) },
            GCurvePoint { sigma: 0.5, j: -1.0, g: g_transform(-1.0) },
        ];
        let csv = dir.path().join("curve.csv");
        let svgp = dir.path().join("curve.svg");
        emit_g_curve(&pts, &csv, Some(&svgp)).unwrap();
        let text = fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with("sigma,J,G\n"));
        assert_eq!(text.lines().count(), 3);
        assert!(fs::read_to_string(&svgp).unwrap().contains("<polyline"));
    }

    #[test]
    fn empty_grid_rejected() {
        let cfg = small_cfg(Preset::Mixture, 0.1, 300, 1);
        let model = cfg.model_config();
        let mut rng = stream_rng(2, 0);
        let y = simulate_model(&model, &mut rng).unwrap();
        let spec = FilterSpec::fir(1, vec![0.0, 1.0, 0.0]).unwrap();
        assert!(g_curve(&spec, &y, 3, &[]).is_err());
        assert!(sigma_grid(0.0, 10).is_err());
    }
}
