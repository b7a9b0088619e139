//! Measure the qualification of each method empirically: how fast does
//! sup_sigma sigma^q |r_t(sigma)| decay in t?
//!
//! ```bash
//! cargo run --release --example qualification
//! ```
//!
//! Gradient descent has infinite qualification (the decay is t^-q for every
//! q); the nu-method has qualification nu (decay t^-2nu, twice the exponent
//! per iteration thanks to the lambda = 1/t^2 clock); Nesterov acceleration
//! is only certified at q = 1/2, and its exact qualification is open -- the
//! fitted exponents below are evidence, not a proof.

use iterreg::filters::{
    filter_trace, qualification_slope, qualification_sup, verification_grid, FilterMethod,
};

fn main() -> iterreg::Result<()> {
    let t_max = 600;
    let (w_lo, w_hi) = (50, 500);
    let grid = verification_grid(1.0, 1.0, t_max, 512)?;

    println!("{:>10} {:>6} {:>14} {:>20}", "method", "q", "fitted slope", "certified decay");
    let gd = FilterMethod::gradient_descent(1.0, 1.0)?;
    let gd_trace = filter_trace(&gd, &grid, t_max)?;
    for q in [0.5, 1.0, 2.0] {
        let sup = qualification_sup(&gd_trace, q)?;
        let slope = qualification_slope(&sup, w_lo, w_hi)?;
        println!("{:>10} {q:>6} {slope:>14.4} {:>20}", "gd", format!("t^-{q}"));
    }

    for nu in [1.0, 2.0] {
        let method = FilterMethod::nu_method(nu, 1.0)?;
        let trace = filter_trace(&method, &grid, t_max)?;
        let sup = qualification_sup(&trace, nu)?;
        let slope = qualification_slope(&sup, w_lo, w_hi)?;
        println!("{:>10} {nu:>6} {slope:>14.4} {:>20}", format!("nu({nu})"), format!("t^-{}", 2.0 * nu));
    }

    let nesterov = FilterMethod::nesterov(0.99, 1.0, 1.0)?;
    let trace = filter_trace(&nesterov, &grid, t_max)?;
    for q in [0.5, 1.0, 1.5] {
        let sup = qualification_sup(&trace, q)?;
        let slope = qualification_slope(&sup, w_lo, w_hi)?;
        let certified = if q == 0.5 { "t^-1 (certified)" } else { "open question" };
        println!("{:>10} {q:>6} {slope:>14.4} {certified:>20}", "nesterov");
    }
    Ok(())
}
