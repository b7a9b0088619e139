//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured margins (run with `--nocapture` to see them).

use std::time::Instant;

use iterreg::cli::commands::{cmd_fit, cmd_simulate};
use iterreg::cli::config::RunConfig;
use iterreg::experiments::{fit_exponent, run_simulation, MethodSpec, SimulationConfig};
use iterreg::filters::{
    filter_trace, jacobi_orthogonality, log_grid, qualification_slope, qualification_sup,
    FilterMethod,
};
use iterreg::solvers::{run, spectral_solution};
use iterreg::spectral::sym_eig;
use iterreg::synthetic::{generate_problem_with, ProblemOptions, SourceKind};
use iterreg::verify::{run_suite, SuiteConfig};
use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

fn seconds(start: Instant) -> f64 {
    start.elapsed().as_secs_f64()
}

/// Criterion 1: every filter bound holds on a 512-point grid up to t = 2000.
#[test]
fn acceptance_1_filter_bound_suite() {
    let start = Instant::now();
    let report = run_suite(&SuiteConfig::default()).expect("suite runs");
    let elapsed = seconds(start);
    assert!(report.all_pass(), "violated bounds:\n{}", report.render());
    // The enumerated bounds are all present.
    for needle in [
        "residual identity",
        "|r_t| <= 1",
        "|g_t| <= alpha t",
        "q = 0.5",
        "q = 1",
        "q = 2",
        "|g_t| <= 2 alpha t^2",
        "(beta^2/alpha)^1/2 / t",
        "auxiliary |R_t| <= 1",
        "sigma r_t^2",
        "|g_t| <= 2 t^2",
    ] {
        assert!(
            report.checks.iter().any(|c| c.name.contains(needle)),
            "missing bound check `{needle}`"
        );
    }
    assert!(elapsed < 30.0, "criterion 1 took {elapsed:.1} s (limit 30 s)");
    println!(
        "ACCEPTANCE 1 filter-bound suite: PASS -- {} bounds hold in {elapsed:.1} s",
        report.checks.len()
    );
}

/// Criterion 2: nu-method qualification exponent for nu in {1, 2}.
#[test]
fn acceptance_2_nu_qualification_exponent() {
    let start = Instant::now();
    let grid = log_grid(1e-8, 1.0, 512).expect("grid");
    let mut slopes = Vec::new();
    for nu in [1.0, 2.0] {
        let method = FilterMethod::nu_method(nu, 1.0).expect("method");
        let trace = filter_trace(&method, &grid, 500).expect("trace");
        let sup = qualification_sup(&trace, nu).expect("sup");
        let slope = qualification_slope(&sup, 50, 500).expect("slope");
        assert!(
            slope <= -2.0 * nu + 0.1,
            "nu = {nu}: slope {slope:.4} exceeds {}",
            -2.0 * nu + 0.1
        );
        slopes.push((nu, slope));
    }
    let elapsed = seconds(start);
    assert!(elapsed < 10.0, "criterion 2 took {elapsed:.1} s (limit 10 s)");
    println!("ACCEPTANCE 2 nu-method qualification: PASS -- slopes {slopes:?} in {elapsed:.1} s");
}

/// Criterion 3: Jacobi-weight orthogonality of the nu-method residuals.
#[test]
fn acceptance_3_jacobi_orthogonality() {
    let start = Instant::now();
    let nu = 1.0;
    let mut diag = [0.0; 7];
    for (t, d) in diag.iter_mut().enumerate().skip(1) {
        *d = jacobi_orthogonality(nu, t, t, 24).expect("diagonal integral");
        assert!(*d > 0.0);
    }
    let mut worst = 0.0_f64;
    for t in 1..=6 {
        for s in 1..=6 {
            if t == s {
                continue;
            }
            let value = jacobi_orthogonality(nu, t, s, 24).expect("integral");
            let normalized = value.abs() / (diag[t] * diag[s]).sqrt();
            worst = worst.max(normalized);
            assert!(normalized <= 1e-4, "pair ({t}, {s}): normalized {normalized:e}");
        }
    }
    let elapsed = seconds(start);
    assert!(elapsed < 10.0, "criterion 3 took {elapsed:.1} s (limit 10 s)");
    println!("ACCEPTANCE 3 jacobi orthogonality: PASS -- worst normalized off-diagonal {worst:.2e} in {elapsed:.1} s");
}

fn random_psd(n: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut b: Array2<f64> = Array2::zeros((n, n));
    for v in b.iter_mut() {
        *v = rng.random_range(-1.0..1.0);
    }
    let m = b.dot(&b.t()) / n as f64;
    let mut sym = m.clone();
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
        }
    }
    sym
}

/// Criterion 4: iterates match the closed-form spectral solution.
#[test]
fn acceptance_4_oracle_equivalence() {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (n, seed) in [(5usize, 41u64), (20, 42), (100, 43)] {
        let m = random_psd(n, seed);
        let mut rng = ChaCha12Rng::seed_from_u64(seed + 1000);
        let y = Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0_f64)));
        let y_norm = y.dot(&y).sqrt();
        let eig = sym_eig(&m).expect("eigendecomposition");
        let kappa_sq = eig.eigenvalues()[0] * 1.01;
        let methods = [
            FilterMethod::gradient_descent(1.0 / kappa_sq, kappa_sq).unwrap(),
            FilterMethod::nu_method(1.0, kappa_sq).unwrap(),
            FilterMethod::nesterov(0.99 / kappa_sq, 1.0, kappa_sq).unwrap(),
        ];
        for method in &methods {
            let history = run(method, &m, &y, 50).expect("solver run");
            for t in [1usize, 7, 50] {
                let oracle = spectral_solution(method, t, &eig, &y).expect("oracle");
                let diff = (history.at(t) - &oracle).mapv(|v| v * v).sum().sqrt();
                let u_norm = history.at(t).dot(history.at(t)).sqrt();
                let relative = diff / u_norm.max(y_norm);
                worst = worst.max(relative);
                assert!(
                    relative <= 1e-8,
                    "{} n={n} t={t}: relative deviation {relative:e}",
                    method.label()
                );
            }
        }
    }
    let elapsed = seconds(start);
    assert!(elapsed < 10.0, "criterion 4 took {elapsed:.1} s (limit 10 s)");
    println!("ACCEPTANCE 4 oracle equivalence: PASS -- worst relative deviation {worst:.2e} in {elapsed:.1} s");
}

/// Criterion 5: accelerated bias halves at least ten times sooner than
/// gradient descent on a spike at sigma = 1e-4.
#[test]
fn acceptance_5_bias_acceleration() {
    let start = Instant::now();
    // gamma = 2 with the source on eigen index 100: d = 100^-2 = 1e-4.
    let options = ProblemOptions { source: SourceKind::Spike(100), ..Default::default() };
    let problem = generate_problem_with(200, 2.0, 0.5, 0.0, 3, &options).expect("problem");
    let halve = |bias: &[f64]| -> usize {
        let half = bias[0] / 2.0;
        (1..bias.len()).find(|&t| bias[t] <= half).expect("bias halves")
    };
    let gd = problem
        .population_bias(&FilterMethod::gradient_descent(1.0, 1.0).unwrap(), 8000)
        .expect("bias curve");
    let nesterov = problem
        .population_bias(&FilterMethod::nesterov(0.99, 1.0, 1.0).unwrap(), 8000)
        .expect("bias curve");
    let nu = problem
        .population_bias(&FilterMethod::nu_method(1.0, 1.0).unwrap(), 8000)
        .expect("bias curve");
    assert!((gd[0] - 1e-4).abs() < 1e-12, "b(0) = d^(2r) = 1e-4, got {:e}", gd[0]);
    let (t_gd, t_nesterov, t_nu) = (halve(&gd), halve(&nesterov), halve(&nu));
    let r_nesterov = t_gd as f64 / t_nesterov as f64;
    let r_nu = t_gd as f64 / t_nu as f64;
    assert!(r_nesterov >= 10.0, "gd/nesterov halving ratio {r_nesterov:.1}");
    assert!(r_nu >= 10.0, "gd/nu halving ratio {r_nu:.1}");
    let elapsed = seconds(start);
    assert!(elapsed < 5.0, "criterion 5 took {elapsed:.1} s (limit 5 s)");
    println!(
        "ACCEPTANCE 5 bias acceleration: PASS -- halving at t = {t_gd} (gd) vs {t_nesterov} (nesterov, {r_nesterov:.0}x) and {t_nu} (nu, {r_nu:.0}x) in {elapsed:.1} s"
    );
}

/// Criterion 6: qualitative reproduction of the synthetic bias-variance
/// experiment at CI scale.
#[test]
fn acceptance_6_bias_variance_experiment() {
    let start = Instant::now();
    let config = SimulationConfig {
        problem_size: 2000,
        sample_size: 100,
        gamma: 1.0,
        source_exponent: 0.5,
        noise_sigma: 0.5,
        t_max: Some(1400),
        repetitions: 50,
        master_seed: 1812,
        ..SimulationConfig::default()
    };
    let curves = run_simulation(&config).expect("simulation");
    let gd = curves.iter().find(|c| c.label == "gd").unwrap();
    let nesterov = curves.iter().find(|c| c.label == "nesterov").unwrap();
    let nu = curves.iter().find(|c| c.label == "nu").unwrap();

    // Ordering: accelerated minima come strictly earlier.
    assert!(nesterov.argmin_t < gd.argmin_t, "nesterov {} vs gd {}", nesterov.argmin_t, gd.argmin_t);
    assert!(nu.argmin_t < gd.argmin_t, "nu {} vs gd {}", nu.argmin_t, gd.argmin_t);
    // Accuracy: minimum mean errors within a factor of two of each other.
    let mins = [gd.min_mean(), nesterov.min_mean(), nu.min_mean()];
    let (lo, hi) = (mins.iter().cloned().fold(f64::INFINITY, f64::min), mins.iter().cloned().fold(0.0, f64::max));
    assert!(hi <= 2.0 * lo, "minimum errors {mins:?} spread beyond a factor of 2");
    // Computation: accelerated argmin at most 3 sqrt(gd argmin).
    let cap = 3.0 * (gd.argmin_t as f64).sqrt();
    assert!((nesterov.argmin_t as f64) <= cap, "nesterov argmin {} > {cap:.1}", nesterov.argmin_t);
    assert!((nu.argmin_t as f64) <= cap, "nu argmin {} > {cap:.1}", nu.argmin_t);
    // At the theoretical stopping rules (sqrt(n) = 10 for gd, n^(1/4) = 3
    // accelerated, unit constants) the mean errors agree within a factor 2:
    // same accuracy, fewer iterations.
    let rule_gd = iterreg::experiments::stopping_rule(
        config.sample_size,
        config.gamma,
        config.source_exponent,
        iterreg::experiments::RuleKind::GradientDescent,
        false,
    )
    .unwrap();
    let rule_acc = iterreg::experiments::stopping_rule(
        config.sample_size,
        config.gamma,
        config.source_exponent,
        iterreg::experiments::RuleKind::Accelerated,
        false,
    )
    .unwrap();
    assert_eq!((rule_gd, rule_acc), (10, 3));
    let at_rule = [gd.mean_at(rule_gd), nesterov.mean_at(rule_acc), nu.mean_at(rule_acc)];
    let rule_lo = at_rule.iter().cloned().fold(f64::INFINITY, f64::min);
    let rule_hi = at_rule.iter().cloned().fold(0.0_f64, f64::max);
    assert!(rule_hi <= 2.0 * rule_lo, "errors at the stopping rules {at_rule:?}");
    // U-shape: the middle-third minimum sits strictly below both endpoints
    // (T = 1400 > 4x the gd argmin).
    for curve in &curves {
        let t_max = curve.t_max();
        let middle = &curve.mean[t_max / 3..2 * t_max / 3];
        let middle_min = middle.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(middle_min < curve.mean[0], "{}: middle min vs start", curve.label);
        assert!(middle_min < curve.mean[t_max - 1], "{}: middle min vs end", curve.label);
        assert!(curve.var.iter().all(|v| *v >= 0.0));
    }
    let elapsed = seconds(start);
    assert!(elapsed < 180.0, "criterion 6 took {elapsed:.1} s (limit 180 s)");
    println!(
        "ACCEPTANCE 6 bias-variance experiment: PASS -- argmin gd {} / nesterov {} / nu {}, minima {mins:?} in {elapsed:.1} s",
        gd.argmin_t, nesterov.argmin_t, nu.argmin_t
    );
}

/// Criterion 7: empirical argmin scaling over the sample size follows the
/// theoretical stopping rules (r = 1: the attainable regime where a generic
/// Gaussian source actually exhibits the rates at desk scale).
#[test]
fn acceptance_7_stopping_rule_scaling() {
    let start = Instant::now();
    let samples = [50usize, 100, 200, 400, 800];
    let mut gd_argmin = Vec::new();
    let mut acc_argmin = Vec::new();
    for &n in &samples {
        let config = SimulationConfig {
            problem_size: 2000,
            sample_size: n,
            gamma: 1.0,
            source_exponent: 1.0,
            noise_sigma: 0.5,
            t_max: Some((50.0 * (n as f64).sqrt()) as usize),
            repetitions: 50,
            methods: vec![MethodSpec::gd(), MethodSpec::nesterov()],
            master_seed: 1812,
            ..SimulationConfig::default()
        };
        let curves = run_simulation(&config).expect("simulation");
        let t_max = curves[0].t_max();
        assert!(curves[0].argmin_t < t_max, "gd argmin clipped at n = {n}");
        assert!(curves[1].argmin_t < curves[1].t_max(), "nesterov argmin clipped at n = {n}");
        gd_argmin.push(curves[0].argmin_t as f64);
        acc_argmin.push(curves[1].argmin_t as f64);
    }
    let ns: Vec<f64> = samples.iter().map(|&n| n as f64).collect();
    let gd_slope = fit_exponent(&ns, &gd_argmin).expect("gd fit");
    let acc_slope = fit_exponent(&ns, &acc_argmin).expect("accelerated fit");
    assert!(
        (0.3..=0.7).contains(&gd_slope),
        "gd exponent {gd_slope:.3} outside [0.3, 0.7]; argmins {gd_argmin:?}"
    );
    assert!(
        (0.1..=0.45).contains(&acc_slope),
        "accelerated exponent {acc_slope:.3} outside [0.1, 0.45]; argmins {acc_argmin:?}"
    );
    let elapsed = seconds(start);
    assert!(elapsed < 600.0, "criterion 7 took {elapsed:.1} s (limit 600 s)");
    println!(
        "ACCEPTANCE 7 stopping-rule scaling: PASS -- exponents gd {gd_slope:.3} (target 0.5), accelerated {acc_slope:.3} (target 0.25) in {elapsed:.1} s"
    );
}

/// Criterion 8: reruns with identical configuration produce byte-identical
/// CSV output.
#[test]
fn acceptance_8_determinism() {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let mut sink = Vec::new();

    let mut config = RunConfig::default();
    config.set("problem_size", "300");
    config.set("sample_size", "40");
    config.set("repetitions", "6");
    config.set("t_max", "60");
    config.set("master_seed", "5");
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    config.set("out", path_a.to_str().unwrap());
    cmd_simulate(&config, &mut sink).expect("first run");
    config.set("out", path_b.to_str().unwrap());
    cmd_simulate(&config, &mut sink).expect("second run");
    let a = std::fs::read(&path_a).expect("read a");
    let b = std::fs::read(&path_b).expect("read b");
    assert!(!a.is_empty() && a == b, "simulate reruns differ");

    // The fit pipeline is deterministic too (seeded split, power iteration).
    let data_path = dir.path().join("toy.dat");
    let mut rng = ChaCha12Rng::seed_from_u64(9);
    let mut text = String::new();
    for _ in 0..220 {
        let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = x[0] * x[1] + 0.3 * rng.random_range(-1.0..1.0_f64);
        text.push_str(&format!("{} {} {} {y}\n", x[0], x[1], x[2]));
    }
    std::fs::write(&data_path, text).expect("write dataset");
    let mut config = RunConfig::default();
    config.set("data", data_path.to_str().unwrap());
    config.set("train_size", "120");
    config.set("t_max", "50");
    let fit_a = dir.path().join("fa.csv");
    let fit_b = dir.path().join("fb.csv");
    config.set("out", fit_a.to_str().unwrap());
    cmd_fit(&config, &mut sink).expect("first fit");
    config.set("out", fit_b.to_str().unwrap());
    cmd_fit(&config, &mut sink).expect("second fit");
    let a = std::fs::read(&fit_a).expect("read fit a");
    let b = std::fs::read(&fit_b).expect("read fit b");
    assert!(!a.is_empty() && a == b, "fit reruns differ");

    let elapsed = seconds(start);
    println!("ACCEPTANCE 8 determinism: PASS -- byte-identical CSVs in {elapsed:.1} s");
}

/// Criterion 9: the real-data pipeline runs end to end on a local
/// pumadyn-8nh--shaped table with both Figure-style kernels, and every
/// test-error curve is finite with an interior minimum. (The published
/// results are figure-only, so this criterion is property-based; point the
/// `fit` subcommand at a real pumadyn8nh file to reproduce the plots.)
#[test]
fn acceptance_9_real_data_smoke() {
    let start = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let data_path = dir.path().join("pumadyn8nh_shaped.dat");
    // Eight inputs, nonlinear response, strong noise: the layout and
    // character of the pumadyn-8nh table.
    let mut rng = ChaCha12Rng::seed_from_u64(88);
    let mut text = String::new();
    for _ in 0..1600 {
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let noise: f64 = rng.sample(rand_distr::StandardNormal);
        let y = (std::f64::consts::PI * x[0]).sin() * x[1] + 0.5 * x[2] * x[3] - x[4].powi(2)
            + 0.5 * noise;
        let row: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
        text.push_str(&format!("{} {y:.6}\n", row.join(" ")));
    }
    std::fs::write(&data_path, text).expect("write dataset");

    let t_max = 2000;
    for (kernel, extra_key, extra_value) in [
        ("gaussian", "kernel_width", "1.2"),
        ("polynomial", "kernel_degree", "9"),
    ] {
        let mut config = RunConfig::default();
        config.set("data", data_path.to_str().unwrap());
        config.set("kernel", kernel);
        config.set(extra_key, extra_value);
        config.set("train_size", "400");
        config.set("t_max", &t_max.to_string());
        let out = dir.path().join(format!("{kernel}.csv"));
        config.set("out", out.to_str().unwrap());
        let mut sink = Vec::new();
        let code = cmd_fit(&config, &mut sink).expect("fit runs");
        assert_eq!(code, 0);

        // Parse the CSV back and find each method's minimum.
        let text = std::fs::read_to_string(&out).expect("read csv");
        let mut best: std::collections::BTreeMap<String, (usize, f64)> = Default::default();
        for line in text.lines().skip(1) {
            let mut parts = line.split(',');
            let method = parts.next().unwrap().to_string();
            let t: usize = parts.next().unwrap().parse().unwrap();
            let err: f64 = parts.next().unwrap().parse().unwrap();
            assert!(err.is_finite(), "{kernel}/{method} at t = {t}: non-finite error");
            let entry = best.entry(method).or_insert((t, err));
            if err < entry.1 {
                *entry = (t, err);
            }
        }
        assert_eq!(best.len(), 3, "{kernel}: expected three methods");
        for (method, (t, err)) in &best {
            assert!(
                *t > 1 && *t < t_max,
                "{kernel}/{method}: minimum {err:e} at t = {t} is not strictly inside (1, {t_max})"
            );
        }
        println!(
            "  {kernel}: minima {:?}",
            best.iter().map(|(m, (t, e))| format!("{m}@t={t} ({e:.3e})")).collect::<Vec<_>>()
        );
    }
    let elapsed = seconds(start);
    println!("ACCEPTANCE 9 real-data smoke: PASS -- both kernels complete with interior minima in {elapsed:.1} s");
}
