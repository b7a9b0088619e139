//! Kernel regression on a local dataset with early stopping along the
//! iteration path.
//!
//! ```bash
//! cargo run --release --example dataset_fit [path/to/dataset]
//! ```
//!
//! Expects a delimiter-separated numeric file with the target in the last
//! column, e.g. the pumadyn-8nh table from the Torgo/Delve regression
//! collection (https://www.dcc.fc.up.pt/~ltorgo/Regression/puma.html; this
//! tool never downloads anything). Without an argument, a synthetic
//! eight-input nonlinear table with the same layout is generated in the
//! temp directory so the example is self-contained.

use std::io::Write as _;

use iterreg::cli::commands::cmd_fit;
use iterreg::cli::config::RunConfig;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;

// Eight inputs, a nonlinear response and substantial noise, mirroring the
// layout and character of the pumadyn-8nh table.
fn synthesize(path: &std::path::Path) -> std::io::Result<()> {
    use rand_distr::StandardNormal;
    let mut rng = ChaCha12Rng::seed_from_u64(88);
    let mut file = std::fs::File::create(path)?;
    for _ in 0..1600 {
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let noise: f64 = rng.sample::<f64, _>(StandardNormal);
        let y = (std::f64::consts::PI * x[0]).sin() * x[1] + 0.5 * x[2] * x[3] - x[4].powi(2)
            + 0.5 * noise;
        let row: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(file, "{} {y:.6}", row.join(" "))?;
    }
    Ok(())
}

fn main() -> iterreg::Result<()> {
    let data_path = match std::env::args().nth(1) {
        Some(path) => std::path::PathBuf::from(path),
        None => {
            let path = std::env::temp_dir().join("dataset_fit_example.dat");
            synthesize(&path)?;
            println!("no dataset given; synthesized {}", path.display());
            path
        }
    };

    let mut stdout = std::io::stdout();
    for (kernel, extra) in [("gaussian", "kernel_width=1.2"), ("polynomial", "kernel_degree=9")] {
        println!("\n=== {kernel} kernel");
        let mut config = RunConfig::default();
        config.set("data", data_path.to_str().expect("utf-8 path"));
        config.set("kernel", kernel);
        let (key, value) = extra.split_once('=').unwrap();
        config.set(key, value);
        config.set("train_size", "400");
        config.set("t_max", "800");
        config.set(
            "out",
            std::env::temp_dir().join(format!("dataset_fit_{kernel}.csv")).to_str().unwrap(),
        );
        cmd_fit(&config, &mut stdout)?;
    }
    Ok(())
}
