//! Theoretical early-stopping rules and an empirical check of their scaling
//! in the sample size.
//!
//! ```bash
//! cargo run --release --example stopping_rules
//! ```
//!
//! Both families reach the same n^{-2 gamma r/(2 gamma r + 1)} learning rate,
//! but gradient descent needs t ~ n^{gamma/(2 gamma r + 1)} iterations while
//! the accelerated methods need only its square root.

use iterreg::experiments::{
    fit_exponent, run_simulation, stopping_rule, MethodSpec, RuleKind, SimulationConfig,
};

fn main() -> iterreg::Result<()> {
    println!("theoretical rules, attainable case (unit constants):");
    println!("{:>8} {:>8} {:>12}", "n", "t_gd", "t_accel");
    for n in [100usize, 1000, 10_000, 100_000] {
        println!(
            "{n:>8} {:>8} {:>12}",
            stopping_rule(n, 1.0, 0.5, RuleKind::GradientDescent, true)?,
            stopping_rule(n, 1.0, 0.5, RuleKind::Accelerated, true)?
        );
    }

    // r = 1: the bias of a generic Gaussian source then decays like
    // lambda^(2r - 1/gamma) = lambda, so the minima actually track the rules.
    // At r = 1/2 with gamma = 1 that exponent degenerates to a logarithm and
    // the empirical argmin grows almost linearly in n instead.
    println!("\nempirical argmin scaling (N = 2000, gamma = 1, r = 1, 30 repetitions):");
    let samples = [50usize, 100, 200, 400];
    let mut gd_argmin = Vec::new();
    let mut acc_argmin = Vec::new();
    for &n in &samples {
        let config = SimulationConfig {
            problem_size: 2000,
            sample_size: n,
            source_exponent: 1.0,
            repetitions: 30,
            t_max: Some((50.0 * (n as f64).sqrt()) as usize),
            methods: vec![MethodSpec::gd(), MethodSpec::nesterov()],
            master_seed: 1812,
            ..SimulationConfig::default()
        };
        let curves = run_simulation(&config)?;
        println!(
            "  n = {n:>4}: argmin_t gd = {:>5}, nesterov = {:>4}",
            curves[0].argmin_t, curves[1].argmin_t
        );
        gd_argmin.push(curves[0].argmin_t as f64);
        acc_argmin.push(curves[1].argmin_t as f64);
    }
    let ns: Vec<f64> = samples.iter().map(|&n| n as f64).collect();
    println!("fitted exponent gd       : {:+.3} (theory 1/2)", fit_exponent(&ns, &gd_argmin)?);
    println!("fitted exponent nesterov : {:+.3} (theory 1/4)", fit_exponent(&ns, &acc_argmin)?);
    Ok(())
}
