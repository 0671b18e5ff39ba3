//! Release-gate checklist: nine end-to-end checks covering the algebraic
//! identities, the two benchmark presets, the degenerate regimes, and the
//! numerical plumbing. Each test prints a `[PASS] i/9` line (visible with
//! `cargo test --test acceptance -- --nocapture`); a failed assertion names
//! the criterion that broke.

use std::time::Instant;

use blindeconv::asymptotics::{h_gradient_interleaved, plug_in_covariance};
use blindeconv::bench::{
    emit_runs, emit_table, run_monte_carlo, ExperimentConfig, Preset, RunStatus,
};
use blindeconv::deconv::{
    build_a_inverse, criterion_j, hankel_matrix, pseudo_moments, ATransform, CriterionSlice,
};
use blindeconv::estimator::{estimate, RootSearchConfig};
use blindeconv::model::{ar2_theta, mixture_config, simulate_model};
use blindeconv::moments::{empirical_moments, moment_standard_errors, FilterSpec};
use blindeconv::rng::{sim_stream, stream_rng};
use blindeconv::Complex64;

fn mixture_experiment(sigma0: f64, n: usize, reps: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        preset: Preset::Mixture,
        sigma0,
        n,
        kn: 1,
        replications: reps,
        seed,
        search: RootSearchConfig::default(),
        output_dir: None,
    }
}

/// Per-point mean absolute estimation error over the kept replications.
fn mean_abs_errors(
    summary: &blindeconv::bench::McSummary,
    extract: impl Fn(&blindeconv::bench::RunRecord) -> Vec<Complex64>,
    truth: &[Complex64],
) -> Vec<f64> {
    let kept: Vec<_> =
        summary.runs.iter().filter(|r| r.status == RunStatus::Ok).collect();
    assert!(!kept.is_empty(), "no kept replications to average");
    let mut errs = vec![0.0; truth.len()];
    for run in &kept {
        let est = extract(run);
        for (i, t) in truth.iter().enumerate() {
            errs[i] += (est[i] - t).norm();
        }
    }
    for e in &mut errs {
        *e /= kept.len() as f64;
    }
    errs
}

#[test]
fn criterion_1_transform_inverse_identity() {
    let started = Instant::now();
    for p in 1..=5usize {
        for &beta in &[0.0, 0.3, 1.0, 2.5] {
            let t = ATransform::new(beta, p).expect("transform builds");
            let residual = t.product_residual();
            assert!(
                residual < 1e-9,
                "criterion 1: forward*inverse residual {residual:.3e} at p={p}, beta={beta}"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "criterion 1: took {elapsed:?}, budget 5 s");
    println!("[PASS] 1/9 denoising transform times its inverse is the identity (max residual < 1e-9, {elapsed:?})");
}

#[test]
fn criterion_2_mixture_reproduction() {
    let started = Instant::now();
    let cfg = mixture_experiment(0.05, 2000, 20, 2001);
    let summary = run_monte_carlo(&cfg).expect("harness completes");
    let truth = cfg.truth();

    assert_eq!(summary.n_eliminated, 0, "criterion 2: expected no eliminated runs");
    assert_eq!(summary.n_failed, 0, "criterion 2: expected no failed runs");

    let sigma_mean = summary.param("sigma").unwrap().mean.re;
    assert!(
        (0.03..=0.08).contains(&sigma_mean),
        "criterion 2: mean sigma {sigma_mean} outside [0.03, 0.08]"
    );

    let point_errs = mean_abs_errors(
        &summary,
        |r| r.points.clone().expect("kept run has points"),
        &truth.points,
    );
    for (i, e) in point_errs.iter().enumerate() {
        assert!(*e < 0.05, "criterion 2: point {i} mean abs error {e} >= 0.05");
    }

    let weight_truth: Vec<Complex64> =
        truth.weights.iter().map(|&w| Complex64::new(w, 0.0)).collect();
    let weight_errs = mean_abs_errors(
        &summary,
        |r| {
            r.weights
                .clone()
                .expect("kept run has weights")
                .into_iter()
                .map(|w| Complex64::new(w, 0.0))
                .collect()
        },
        &weight_truth,
    );
    for (i, e) in weight_errs.iter().enumerate() {
        assert!(*e < 0.03, "criterion 2: weight {i} mean abs error {e} >= 0.03");
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 600.0, "criterion 2: took {elapsed:?}, budget 10 min");
    println!(
        "[PASS] 2/9 mixture benchmark: mean sigma {sigma_mean:.4}, max point err {:.4}, max weight err {:.4}, no eliminations ({elapsed:?})",
        point_errs.iter().cloned().fold(0.0, f64::max),
        weight_errs.iter().cloned().fold(0.0, f64::max)
    );
}

#[test]
fn criterion_3_autoregressive_reproduction() {
    let cfg = ExperimentConfig {
        preset: Preset::Ar2,
        sigma0: 0.05,
        n: 1000,
        kn: 1,
        replications: 20,
        seed: 3003,
        search: RootSearchConfig::default(),
        output_dir: None,
    };
    let summary = run_monte_carlo(&cfg).expect("harness completes");
    let truth: Vec<f64> = ar2_theta().iter().map(|c| c.re).collect();

    let mut worst = 0.0f64;
    for (i, t) in truth.iter().enumerate() {
        let mean = summary.param(&format!("theta_{i}")).unwrap().mean.re;
        let err = (mean - t).abs();
        worst = worst.max(err);
        assert!(
            err < 0.03,
            "criterion 3: filter tap {i} mean {mean} vs true {t} (err {err})"
        );
    }
    let sigma_mean = summary.param("sigma").unwrap().mean.re;
    assert!(
        (0.03..=0.09).contains(&sigma_mean),
        "criterion 3: mean sigma {sigma_mean} outside [0.03, 0.09]"
    );
    println!(
        "[PASS] 3/9 autoregressive benchmark: worst tap error {worst:.4}, mean sigma {sigma_mean:.4}"
    );
}

#[test]
fn criterion_4_large_noise_accounting() {
    let cfg = mixture_experiment(1.0, 1000, 10, 4004);
    let summary = run_monte_carlo(&cfg).expect("harness must complete at sigma0 = 1");

    assert_eq!(summary.n_requested, 10);
    assert_eq!(
        summary.n_used() + summary.n_eliminated + summary.n_failed,
        10,
        "criterion 4: accounting must partition the replications"
    );
    for run in &summary.runs {
        match run.status {
            RunStatus::Eliminated => {
                let ws = run.weights.as_ref().expect("eliminated run has weights");
                assert!(
                    ws.iter().any(|&w| w < 0.0),
                    "criterion 4: eliminated run {} has no negative weight",
                    run.rep
                );
            }
            RunStatus::Ok => {
                let ws = run.weights.as_ref().expect("kept run has weights");
                assert!(
                    ws.iter().all(|&w| w >= 0.0),
                    "criterion 4: kept run {} has a negative weight",
                    run.rep
                );
            }
            RunStatus::Failed => {
                assert!(run.error.is_some(), "criterion 4: failed run lacks an error message");
                assert!(run.weights.is_none());
            }
        }
    }
    println!(
        "[PASS] 4/9 large-noise run: completed with {} kept / {} eliminated / {} failed of 10",
        summary.n_used(),
        summary.n_eliminated,
        summary.n_failed
    );
}

#[test]
fn criterion_5_noiseless_characterization() {
    let model = mixture_config(0.0, 5000);
    let mut rng = stream_rng(5005, 0);
    let y = simulate_model(&model, &mut rng).expect("simulation");

    let mut search_rng = stream_rng(5005, 1);
    let est = estimate(&y, 1, 3, &RootSearchConfig::default(), &mut search_rng)
        .expect("estimation on noiseless data");
    assert!(est.sigma_hat < 0.02, "criterion 5: sigma {} >= 0.02 on noiseless data", est.sigma_hat);

    // The zero-noise criterion must vanish at the true filter but not at a
    // perturbed one.
    let true_spec = FilterSpec::fir(1, vec![0.0, 1.0, 0.0]).unwrap();
    let pert_spec = FilterSpec::fir(1, vec![0.2, 1.0, 0.0]).unwrap();
    let j_true = criterion_j(0.0, &true_spec, &y, 3).unwrap().abs();
    let j_pert = criterion_j(0.0, &pert_spec, &y, 3).unwrap().abs();
    assert!(
        j_true <= j_pert / 10.0,
        "criterion 5: |J| at the true filter ({j_true:.3e}) not 10x below perturbed ({j_pert:.3e})"
    );
    println!(
        "[PASS] 5/9 noiseless data: sigma {:.2e}, criterion ratio {:.1e}",
        est.sigma_hat,
        j_pert / j_true.max(f64::MIN_POSITIVE)
    );
}

#[test]
fn criterion_6_partial_denoising_matches_fresh_noise() {
    // Removing a sigma = 0.6 share from unit-variance noise must leave the
    // moments of a sigma = 0.8 process: the removed and remaining shares add
    // in quadrature (0.36 + 0.64 = 1).
    let n = 100_000;
    let p = 3;
    let y_full = {
        let mut rng = stream_rng(6006, 0);
        simulate_model(&mixture_config(1.0, n), &mut rng).expect("simulation")
    };
    let y_fresh = {
        let mut rng = stream_rng(6006, 1);
        simulate_model(&mixture_config(0.8, n), &mut rng).expect("simulation")
    };

    let d_full = empirical_moments(&y_full, p).unwrap();
    let partial = pseudo_moments(&d_full, 0.6, 1.0).unwrap();
    let d_fresh = empirical_moments(&y_fresh, p).unwrap();

    let se_full = moment_standard_errors(&y_full, p).unwrap();
    let se_fresh = moment_standard_errors(&y_fresh, p).unwrap();
    // The denoising transform mixes entries linearly; propagate the input
    // standard errors through the absolute values of its coefficients.
    let ainv = build_a_inverse(0.6, p).unwrap();
    let m2 = (p + 1) * (p + 1);
    let mut worst_ratio = 0.0f64;
    for i in 0..m2 {
        let se_partial: f64 = (0..m2).map(|c| ainv[(i, c)].abs() * se_full[c]).sum();
        let tol = 5.0 * (se_partial + se_fresh[i]);
        let diff = (partial.entries[i] - d_fresh.entries[i]).norm();
        if tol > 0.0 {
            worst_ratio = worst_ratio.max(diff / tol);
        }
        assert!(
            diff <= tol || diff < 1e-12,
            "criterion 6: entry {i} differs by {diff:.3e}, tolerance {tol:.3e}"
        );
    }
    println!(
        "[PASS] 6/9 partial denoising matches fresh lower-noise moments (worst diff at {:.0}% of the 5-SE budget)",
        100.0 * worst_ratio
    );
}

#[test]
fn criterion_7_numerical_analysis_suite() {
    let model = mixture_config(0.3, 3000);
    let mut rng = stream_rng(7007, 0);
    let y = simulate_model(&model, &mut rng).expect("simulation");
    let spec = FilterSpec::fir(1, vec![0.0, 1.0, 0.0]).unwrap();
    let slice = CriterionSlice::from_observations(&spec, &y, 3).unwrap();

    // (a) analytic determinant gradient against central differences.
    let d_tilde = pseudo_moments(&slice.d_n, 0.2, slice.norm).unwrap();
    let matrix = hankel_matrix(&d_tilde);
    let grad = h_gradient_interleaved(&matrix);
    let m2 = d_tilde.entries.len();
    let scale = d_tilde.entries.iter().map(|e| e.norm()).fold(1.0, f64::max);
    let h = 1e-5 * scale;
    let mut fd = vec![0.0; 2 * m2];
    for i in 0..m2 {
        for (slot, delta) in [(2 * i, Complex64::new(h, 0.0)), (2 * i + 1, Complex64::new(0.0, h))]
        {
            let mut plus = d_tilde.clone();
            plus.entries[i] += delta;
            let mut minus = d_tilde.clone();
            minus.entries[i] -= delta;
            fd[slot] = (hankel_matrix(&plus).determinant().re
                - hankel_matrix(&minus).determinant().re)
                / (2.0 * h);
        }
    }
    let gmax = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
    let rel = grad
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / gmax;
    assert!(rel < 1e-6, "criterion 7: determinant gradient off by {rel:.3e} relative");

    // (b) second differences of the criterion converge at second order.
    let second = |h: f64| (slice.j(0.2 + h) - 2.0 * slice.j(0.2) + slice.j(0.2 - h)) / (h * h);
    let reference = second(1e-3);
    let err_big = (second(1.6e-2) - reference).abs();
    let err_small = (second(0.8e-2) - reference).abs();
    let order = err_big / err_small.max(f64::MIN_POSITIVE);
    assert!(
        (2.5..6.0).contains(&order),
        "criterion 7: halving the step shrank the error by {order:.2}, expected about 4"
    );

    // (c) symmetrized matrix is exactly Hermitian.
    let dim = matrix.dim();
    let mut herm = 0.0f64;
    for k in 0..dim {
        for j in 0..dim {
            herm = herm.max((matrix.entry(k, j) - matrix.entry(j, k).conj()).norm());
        }
    }
    assert!(herm < 1e-10, "criterion 7: Hermitian residual {herm:.3e}");

    // (d) its determinant is real to rounding.
    let det = hankel_matrix(&pseudo_moments(&slice.d_n, 0.0, slice.norm).unwrap()).determinant();
    let imag_rel = det.im.abs() / det.re.abs();
    assert!(imag_rel < 1e-10, "criterion 7: determinant imaginary part {imag_rel:.3e} relative");

    println!(
        "[PASS] 7/9 numerics: gradient rel err {rel:.1e}, FD order ratio {order:.2}, Hermitian residual {herm:.1e}, det imag {imag_rel:.1e}"
    );
}

#[test]
fn criterion_8_dispersion_scales_with_sample_size() {
    let small = run_monte_carlo(&mixture_experiment(0.05, 1000, 20, 77)).unwrap();
    let large = run_monte_carlo(&mixture_experiment(0.05, 4000, 20, 78)).unwrap();
    assert_eq!(small.n_failed, 0);
    assert_eq!(large.n_failed, 0);

    let s_small = small.param("sigma").unwrap().std.expect("std over 20 runs");
    let s_large = large.param("sigma").unwrap().std.expect("std over 20 runs");
    let ratio = (s_small * (1000f64).sqrt()) / (s_large * (4000f64).sqrt());
    assert!(
        (0.6..=1.6).contains(&ratio),
        "criterion 8: sqrt(n)-scaled std ratio {ratio} outside [0.6, 1.6]"
    );

    // Plug-in dispersion against the Monte Carlo dispersion at n = 1000,
    // averaged over a few replications to damp single-draw luck.
    let cfg = mixture_experiment(0.05, 1000, 20, 77);
    let model = cfg.model_config();
    let mut plug = 0.0;
    let reps = 3;
    for rep in 0..reps {
        let mut sim = stream_rng(cfg.seed, sim_stream(rep as u64));
        let y = simulate_model(&model, &mut sim).unwrap();
        let mut search = stream_rng(cfg.seed, blindeconv::rng::search_stream(rep as u64));
        let est = estimate(&y, cfg.kn, 3, &cfg.search, &mut search).unwrap();
        plug += plug_in_covariance(&y, &est).unwrap().sigma_std();
    }
    plug /= reps as f64;
    let factor = plug / s_small;
    assert!(
        (1.0 / 3.0..=3.0).contains(&factor),
        "criterion 8: plug-in std {plug:.2e} vs Monte Carlo {s_small:.2e} (factor {factor:.2})"
    );
    println!(
        "[PASS] 8/9 dispersion: sqrt(n)-scaled ratio {ratio:.2}, plug-in/Monte-Carlo factor {factor:.2}"
    );
}

#[test]
fn criterion_9_benchmark_tables_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = mixture_experiment(0.05, 600, 4, 909);
    cfg.output_dir = None;

    // Default worker pool.
    let first = run_monte_carlo(&cfg).unwrap();
    // Single-threaded pool: the tables may not depend on scheduling.
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let second = pool.install(|| run_monte_carlo(&cfg)).unwrap();
    // And once more on the default pool.
    let third = run_monte_carlo(&cfg).unwrap();

    let paths: Vec<_> = (0..3)
        .map(|i| (dir.path().join(format!("s{i}.csv")), dir.path().join(format!("r{i}.csv"))))
        .collect();
    for (summary, (sp, rp)) in [&first, &second, &third].iter().zip(&paths) {
        emit_table(summary, sp).unwrap();
        emit_runs(summary, rp).unwrap();
    }
    let read = |p: &std::path::Path| std::fs::read(p).unwrap();
    assert_eq!(
        read(&paths[0].0),
        read(&paths[1].0),
        "criterion 9: summary tables differ across worker counts"
    );
    assert_eq!(read(&paths[0].0), read(&paths[2].0), "criterion 9: summary tables differ across runs");
    assert_eq!(read(&paths[0].1), read(&paths[1].1), "criterion 9: run logs differ across worker counts");
    assert_eq!(read(&paths[0].1), read(&paths[2].1), "criterion 9: run logs differ across runs");
    println!("[PASS] 9/9 benchmark tables are byte-identical across repeats and worker counts");
}
