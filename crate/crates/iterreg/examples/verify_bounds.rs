//! Run the full filter-bound suite and print one line per bound.
//!
//! ```bash
//! cargo run --release --example verify_bounds
//! ```
//!
//! Checks the residual identity, the uniform residual bound, the filter
//! growth bounds, gradient descent and Nesterov qualification, the nu-method
//! qualification slope, and both Nesterov auxiliary inequalities, all on a
//! 512-point grid for t up to 2000.

use iterreg::verify::{run_suite, SuiteConfig};

fn main() -> iterreg::Result<()> {
    let report = run_suite(&SuiteConfig::default())?;
    print!("{}", report.render());

    // A deliberately broken step size shows up as failed bounds, not as an
    // error: the suite measures, it does not assume.
    let faulty = SuiteConfig { gd_alpha: Some(2.0), t_max: 300, grid_points: 256, slope_window: (40, 250), ..SuiteConfig::default() };
    let report = run_suite(&faulty)?;
    println!("\nwith gd_alpha = 2/kappa_sq (too large):");
    for check in report.checks.iter().filter(|c| c.method == "gd" && !c.pass) {
        println!("  violated: {} (margin {:+.3e})", check.name, check.margin);
    }
    Ok(())
}
