//! The effective dimension N(lambda) = Tr(L (L + lambda)^{-1}) of a
//! polynomially decaying spectrum, against its lambda^{-1/gamma} envelope.
//!
//! ```bash
//! cargo run --release --example effective_dimension
//! ```

use iterreg::spectral::effective_dimension;

fn main() -> iterreg::Result<()> {
    let n = 2000;
    for gamma in [1.0, 2.0] {
        let eigenvalues: Vec<f64> = (1..=n).map(|i| (i as f64).powf(-gamma)).collect();
        // Fit the envelope constant on a coarse grid, then check it holds on
        // a finer one.
        let coarse: Vec<f64> = (0..9).map(|k| 10f64.powf(-4.0 + 0.5 * k as f64)).collect();
        let mut c = 0.0_f64;
        for &lambda in &coarse {
            let nd = effective_dimension(&eigenvalues, lambda)?;
            c = c.max(nd * lambda.powf(1.0 / gamma));
        }
        println!("gamma = {gamma}: fitted envelope N(lambda) <= {c:.3} * lambda^(-1/{gamma})");
        println!("{:>12} {:>14} {:>18} {:>10}", "lambda", "N(lambda)", "envelope", "ratio");
        for k in 0..13 {
            let lambda = 10f64.powf(-4.0 + k as f64 / 3.0);
            let nd = effective_dimension(&eigenvalues, lambda)?;
            let envelope = c * lambda.powf(-1.0 / gamma);
            println!("{lambda:>12.3e} {nd:>14.4} {envelope:>18.4} {:>10.3}", nd / envelope);
            assert!(nd <= envelope * (1.0 + 1e-9));
            assert!(nd <= n as f64);
        }
        println!();
    }
    Ok(())
}
