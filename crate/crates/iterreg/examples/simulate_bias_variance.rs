//! Desk-scale bias-variance experiment: mean and variance of the excess
//! risk over repeated sampling, with the located minima.
//!
//! ```bash
//! cargo run --release --example simulate_bias_variance
//! ```
//!
//! Accelerated methods reach (roughly) the same minimum error as gradient
//! descent at far smaller iteration counts, then destabilize faster -- the
//! whole point of treating the iteration count as a regularization
//! parameter. Writes the curves as CSV and an SVG chart to the system temp
//! directory.

use iterreg::cli::output::{fmt_float, svg_loglog_chart, write_text, CsvWriter, Series};
use iterreg::experiments::{run_simulation, SimulationConfig};

fn main() -> iterreg::Result<()> {
    let config = SimulationConfig {
        problem_size: 1000,
        sample_size: 100,
        t_max: Some(500),
        repetitions: 30,
        master_seed: 20,
        ..SimulationConfig::default()
    };
    println!(
        "N = {}, n = {}, gamma = {}, r = {}, noise = {}, {} repetitions",
        config.problem_size,
        config.sample_size,
        config.gamma,
        config.source_exponent,
        config.noise_sigma,
        config.repetitions
    );
    let curves = run_simulation(&config)?;

    println!("{:>10} {:>10} {:>16} {:>16}", "method", "argmin t", "min mean error", "error at T");
    for curve in &curves {
        println!(
            "{:>10} {:>10} {:>16.6e} {:>16.6e}",
            curve.label,
            curve.argmin_t,
            curve.min_mean(),
            curve.mean.last().unwrap()
        );
    }

    let dir = std::env::temp_dir();
    let csv_path = dir.join("simulate_bias_variance.csv");
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
    csv.write_to(&csv_path)?;

    let svg_path = dir.join("simulate_bias_variance.svg");
    let series: Vec<Series> = curves
        .iter()
        .map(|c| Series {
            label: c.label.clone(),
            points: (1..=c.t_max()).map(|t| (t as f64, c.mean[t - 1])).collect(),
            marker: Some(c.argmin_t - 1),
        })
        .collect();
    write_text(&svg_path, &svg_loglog_chart(&series, "t", "mean excess risk"))?;
    println!("\nwrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}
