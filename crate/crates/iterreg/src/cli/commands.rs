//! The `verify`, `filters`, `simulate` and `fit` subcommands.

use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::cli::config::RunConfig;
use crate::cli::dataset;
use crate::cli::output::{fmt_float, svg_loglog_chart, write_text, CsvWriter, Series};
use crate::cli::{EXIT_CHECK_FAILURE, EXIT_SUCCESS};
use crate::error::{Error, Result};
use crate::experiments::{self, MethodSpec, SimulationConfig};
use crate::filters;
use crate::kernels::{self, Kernel};
use crate::verify::{run_suite, SuiteConfig};

pub fn key_help(subcommand: &str) -> Result<String> {
    let text = match subcommand {
        "verify" => {
            "verify keys (defaults in parentheses):
  t_max (2000)          largest iteration checked
  grid_points (512)     log-grid resolution on [1e-8, kappa_sq]
  kappa_sq (1.0)        spectral bound shared by all methods
  gd_alpha (1/kappa_sq) gradient descent step
  nesterov_alpha (0.99/kappa_sq)
  nesterov_beta (1.0)
  nu (1,2)              comma-separated nu-method instances
  slope_t_min (50), slope_t_max (500)  window of the nu slope fit
"
        }
        "filters" => {
            "filters keys (defaults in parentheses):
  out (filters.csv)     output CSV: method,t,sigma,g,r
  t_max (50)            iterations per method
  grid_points (64)      log-grid resolution
  grid_min (1e-4)       smallest sigma on the grid
  kappa_sq (1.0)        spectral bound / largest sigma
  methods (gd,nesterov,nu)
  gd_alpha (1/kappa_sq), nesterov_alpha (0.99/kappa_sq), nesterov_beta (1.0), nu (1.0)
"
        }
        "simulate" => {
            "simulate keys (defaults in parentheses):
  out (simulate.csv)    output CSV: method,t,mean_error,var_error,is_min
  svg_out (none)        optional SVG chart of the mean curves
  problem_size (2000)   ambient size N
  sample_size (100)     sample size n per repetition
  gamma (1.0)           spectrum decay
  source_exponent (0.5) source smoothness r
  noise_sigma (0.5)     label noise standard deviation
  target_norm (0.5)     norm of the target f_H; `none` normalizes the source
  repetitions (50)
  t_max (20x stopping rule per method)
  methods (gd,nesterov,nu)
  gd_alpha, nesterov_alpha (per-sample defaults), nesterov_beta (1.0), nu (1.0)
  master_seed (1812)    problem seed; repetition k samples with master_seed+k
  replacement (true)    i.i.d. index sampling; false only for the n=N diagnostic
  rule_multiplier (1.0) multiplier on the stopping-rule constant
"
        }
        "fit" => {
            "fit keys (defaults in parentheses):
  data (required)       local delimiter-separated numeric file, target last
  out (fit.csv)         output CSV: method,t,test_error
  skip_header (false)   skip a non-numeric first row
  train_size (1000)     training rows; the rest is the test split
  seed (42)             seed of the train/test shuffle
  kernel (gaussian)     gaussian | polynomial | linear
  kernel_width (1.2)    gaussian width
  kernel_degree (9), kernel_offset (1.0)  polynomial parameters
  t_max (300)           iterations per method
  methods (gd,nesterov,nu)
  gd_alpha, nesterov_alpha, nesterov_beta (1.0), nu (1.0)
"
        }
        other => return Err(Error::domain(format!("unknown subcommand `{other}`"))),
    };
    Ok(text.to_string())
}

fn parse_methods(config: &RunConfig) -> Result<Vec<MethodSpec>> {
    let raw = config.str_or("methods", "gd,nesterov,nu");
    let gd_alpha = config.f64_opt("gd_alpha")?;
    let nesterov_alpha = config.f64_opt("nesterov_alpha")?;
    let nesterov_beta = config.f64_or("nesterov_beta", 1.0)?;
    let nu = config.f64_or("nu", 1.0)?;
    let mut specs = Vec::new();
    for part in raw.split(',') {
        let spec = match part.trim() {
            "gd" => MethodSpec { alpha: gd_alpha, ..MethodSpec::gd() },
            "nesterov" => MethodSpec { alpha: nesterov_alpha, beta: nesterov_beta, ..MethodSpec::nesterov() },
            "nu" => MethodSpec { nu, ..MethodSpec::nu_method() },
            other => {
                return Err(Error::domain(format!(
                    "unknown method `{other}`; expected a comma-separated subset of gd, nesterov, nu"
                )));
            }
        };
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(Error::domain("method list is empty"));
    }
    Ok(specs)
}

/// Run the filter-bound suite and print the report; exit 1 on any violation.
pub fn cmd_verify<W: Write>(config: &RunConfig, out: &mut W) -> Result<i32> {
    config.ensure_known_keys(&[
        "t_max",
        "grid_points",
        "kappa_sq",
        "gd_alpha",
        "nesterov_alpha",
        "nesterov_beta",
        "nu",
        "slope_t_min",
        "slope_t_max",
    ])?;
    let t_max = config.usize_or("t_max", 2000)?;
    let slope_hi_default = 500.min(t_max);
    let suite = SuiteConfig {
        t_max,
        grid_points: config.usize_or("grid_points", 512)?,
        kappa_sq: config.f64_or("kappa_sq", 1.0)?,
        gd_alpha: config.f64_opt("gd_alpha")?,
        nesterov_alpha: config.f64_opt("nesterov_alpha")?,
        nesterov_beta: config.f64_or("nesterov_beta", 1.0)?,
        nus: config.f64_list_or("nu", &[1.0, 2.0])?,
        slope_window: (
            config.usize_or("slope_t_min", 50.min(t_max / 4).max(1))?,
            config.usize_or("slope_t_max", slope_hi_default)?,
        ),
    };
    if suite.t_max < 1 || suite.grid_points < 2 {
        return Err(Error::domain("verify needs t_max >= 1 and grid_points >= 2"));
    }
    if !(suite.kappa_sq > 0.0) {
        return Err(Error::domain("kappa_sq must be positive"));
    }
    let report = run_suite(&suite)?;
    write!(out, "{}", report.render())?;
    Ok(if report.all_pass() { EXIT_SUCCESS } else { EXIT_CHECK_FAILURE })
}

/// Dump filter traces for plotting or inspection.
pub fn cmd_filters<W: Write>(config: &RunConfig, out: &mut W) -> Result<i32> {
    config.ensure_known_keys(&[
        "out",
        "t_max",
        "grid_points",
        "grid_min",
        "kappa_sq",
        "methods",
        "gd_alpha",
        "nesterov_alpha",
        "nesterov_beta",
        "nu",
    ])?;
    let kappa_sq = config.f64_or("kappa_sq", 1.0)?;
    let t_max = config.usize_or("t_max", 50)?;
    let grid_points = config.usize_or("grid_points", 64)?;
    let grid_min = config.f64_or("grid_min", 1e-4)?;
    let specs = parse_methods(config)?;
    let grid = filters::log_grid(grid_min, kappa_sq, grid_points)?;

    let mut csv = CsvWriter::new(&["method", "t", "sigma", "g", "r"]);
    for spec in &specs {
        let method = spec.instantiate(kappa_sq)?;
        let trace = filters::filter_trace(&method, &grid, t_max)?;
        for t in 0..=t_max {
            for (j, &sigma) in grid.iter().enumerate() {
                csv.row(&[
                    method.label().to_string(),
                    t.to_string(),
                    fmt_float(sigma),
                    fmt_float(trace.g_at(t, j)),
                    fmt_float(trace.r_at(t, j)),
                ]);
            }
        }
    }
    let path = config.str_or("out", "filters.csv").to_string();
    csv.write_to(Path::new(&path))?;
    writeln!(
        out,
        "wrote {} rows ({} methods, t = 0..={t_max}, {} grid points) to {path}",
        specs.len() * (t_max + 1) * grid.len(),
        specs.len(),
        grid.len()
    )?;
    Ok(EXIT_SUCCESS)
}

/// Bias-variance curves over repeated sampling of the synthetic problem.
pub fn cmd_simulate<W: Write>(config: &RunConfig, out: &mut W) -> Result<i32> {
    config.ensure_known_keys(&[
        "out",
        "svg_out",
        "problem_size",
        "sample_size",
        "gamma",
        "source_exponent",
        "noise_sigma",
        "target_norm",
        "repetitions",
        "t_max",
        "methods",
        "gd_alpha",
        "nesterov_alpha",
        "nesterov_beta",
        "nu",
        "master_seed",
        "replacement",
        "rule_multiplier",
    ])?;
    let sim = SimulationConfig {
        problem_size: config.usize_or("problem_size", 2000)?,
        sample_size: config.usize_or("sample_size", 100)?,
        gamma: config.f64_or("gamma", 1.0)?,
        source_exponent: config.f64_or("source_exponent", 0.5)?,
        noise_sigma: config.f64_or("noise_sigma", 0.5)?,
        target_norm: match config.str_or("target_norm", "0.5") {
            "none" => None,
            raw => Some(raw.parse::<f64>().map_err(|_| {
                Error::domain(format!("config key `target_norm` must be a number or `none`, got `{raw}`"))
            })?),
        },
        t_max: config.usize_opt("t_max")?,
        repetitions: config.usize_or("repetitions", 50)?,
        methods: parse_methods(config)?,
        master_seed: config.u64_or("master_seed", 1812)?,
        replacement: config.bool_or("replacement", true)?,
        rule_multiplier: config.f64_or("rule_multiplier", 1.0)?,
    };
    let curves = experiments::run_simulation(&sim)?;

    let mut csv = CsvWriter::new(&["method", "t", "mean_error", "var_error", "is_min"]);
    for curve in &curves {
        for t in 1..=curve.t_max() {
            csv.row(&[
                curve.label.clone(),
                t.to_string(),
                fmt_float(curve.mean[t - 1]),
                fmt_float(curve.var[t - 1]),
                if t == curve.argmin_t { "1".into() } else { "0".into() },
            ]);
        }
    }
    let path = config.str_or("out", "simulate.csv").to_string();
    csv.write_to(Path::new(&path))?;
    for curve in &curves {
        writeln!(
            out,
            "{}: argmin t = {}, min mean error = {:.6e}",
            curve.label,
            curve.argmin_t,
            curve.min_mean()
        )?;
    }
    writeln!(out, "wrote {path}")?;

    if let Some(svg_path) = config.get("svg_out") {
        let series: Vec<Series> = curves
            .iter()
            .map(|c| Series {
                label: c.label.clone(),
                points: (1..=c.t_max()).map(|t| (t as f64, c.mean[t - 1])).collect(),
                marker: Some(c.argmin_t - 1),
            })
            .collect();
        write_text(Path::new(svg_path), &svg_loglog_chart(&series, "t", "mean excess risk"))?;
        writeln!(out, "wrote {svg_path}")?;
    }
    Ok(EXIT_SUCCESS)
}

/// Kernel regression on a local dataset: per-iteration test error curves.
pub fn cmd_fit<W: Write>(config: &RunConfig, out: &mut W) -> Result<i32> {
    config.ensure_known_keys(&[
        "data",
        "out",
        "skip_header",
        "train_size",
        "seed",
        "kernel",
        "kernel_width",
        "kernel_degree",
        "kernel_offset",
        "t_max",
        "methods",
        "gd_alpha",
        "nesterov_alpha",
        "nesterov_beta",
        "nu",
    ])?;
    let data_path = config
        .get("data")
        .ok_or_else(|| Error::domain("fit needs data=<path> pointing at a local dataset"))?
        .to_string();
    let kernel = match config.str_or("kernel", "gaussian") {
        "gaussian" => Kernel::gaussian(config.f64_or("kernel_width", 1.2)?)?,
        "polynomial" => Kernel::polynomial(
            config.usize_or("kernel_degree", 9)? as u32,
            config.f64_or("kernel_offset", 1.0)?,
        )?,
        "linear" => Kernel::Linear,
        other => return Err(Error::domain(format!("unknown kernel `{other}`"))),
    };
    let t_max = config.usize_or("t_max", 300)?;
    if t_max < 1 {
        return Err(Error::domain("fit needs t_max >= 1"));
    }
    let specs = parse_methods(config)?;
    let train_size = config.usize_or("train_size", 1000)?;
    let seed = config.u64_or("seed", 42)?;

    let mut data = dataset::load_dataset(Path::new(&data_path), config.bool_or("skip_header", false)?)?;
    kernels::standardize(&mut data.features);
    let rows = data.features.nrows();
    let (train_idx, test_idx) = dataset::split_indices(rows, train_size.min(rows.saturating_sub(1)).max(1), seed)?;
    let train = select_rows(&data.features, &train_idx);
    let test = select_rows(&data.features, &test_idx);
    let y_train = ndarray::Array1::from_iter(train_idx.iter().map(|&i| data.targets[i]));
    let y_test = ndarray::Array1::from_iter(test_idx.iter().map(|&i| data.targets[i]));

    let n = train.nrows();
    let (gram, diag_kappa_sq) = kernels::gram(&train.view(), &kernel)?;
    let operator = &gram / n as f64;
    let kappa_sq = spectral_bound(&operator, diag_kappa_sq);
    let cross = kernels::cross_gram(&test.view(), &train.view(), &kernel)?;

    let mut csv = CsvWriter::new(&["method", "t", "test_error"]);
    for spec in &specs {
        let method = spec.instantiate(kappa_sq)?;
        let mut iterates = Array2::zeros((n, t_max));
        crate::solvers::run_with(&method, &operator, &y_train, t_max, |t, u| {
            if t >= 1 {
                iterates.column_mut(t - 1).assign(u);
            }
        })?;
        let predictions = cross.dot(&iterates) / n as f64;
        let mut best = (1usize, f64::INFINITY);
        for t in 1..=t_max {
            let col = predictions.column(t - 1);
            let mut mse = 0.0;
            for (p, y) in col.iter().zip(&y_test) {
                let d = p - y;
                mse += d * d;
            }
            mse /= y_test.len() as f64;
            if !mse.is_finite() {
                return Err(Error::numeric(format!(
                    "test error became non-finite for {} at t = {t}",
                    method.label()
                )));
            }
            if mse < best.1 {
                best = (t, mse);
            }
            csv.row(&[method.label().to_string(), t.to_string(), fmt_float(mse)]);
        }
        writeln!(out, "{}: best test error {:.6e} at t = {}", method.label(), best.1, best.0)?;
    }
    let path = config.str_or("out", "fit.csv").to_string();
    csv.write_to(Path::new(&path))?;
    writeln!(
        out,
        "kernel = {}, train rows = {n}, test rows = {}, wrote {path}",
        kernel.label(),
        y_test.len()
    )?;
    Ok(EXIT_SUCCESS)
}

fn select_rows(features: &Array2<f64>, indices: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((indices.len(), features.ncols()));
    for (row, &i) in indices.iter().enumerate() {
        out.row_mut(row).assign(&features.row(i));
    }
    out
}

/// Spectral bound for the fit pipeline: a deterministic power iteration on
/// the normalized Gram, padded by 20 percent. The Gram diagonal also bounds
/// the operator norm, but for a degree-9 polynomial kernel its maximum sits
/// orders of magnitude above the actual spectrum (row-norm extremes raised
/// to the ninth power), and step sizes derived from it stall gradient
/// descent; every diagonal entry is a Rayleigh quotient, so the spectral
/// estimate keeps the solver's own validation intact.
fn spectral_bound(operator: &Array2<f64>, diag_bound: f64) -> f64 {
    let n = operator.nrows();
    let mut v = ndarray::Array1::from_iter((0..n).map(|i| 1.0 + 0.01 * (i as f64).sin()));
    let mut norm = v.dot(&v).sqrt();
    v /= norm;
    let mut estimate = 0.0;
    for _ in 0..100 {
        v = operator.dot(&v);
        norm = v.dot(&v).sqrt();
        if norm == 0.0 {
            return diag_bound;
        }
        v /= norm;
        estimate = norm;
    }
    (1.2 * estimate).min(diag_bound)
}
