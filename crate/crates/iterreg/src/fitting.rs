//! Least-squares slope in log-log coordinates, shared by the qualification
//! analyzer and the experiment harness.

use crate::error::{Error, Result};

/// Slope of the least-squares line through `(ln x_i, ln y_i)`.
///
/// Requires at least two points and strictly positive coordinates.
pub(crate) fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::domain(format!(
            "slope fit needs matching lengths, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::domain("slope fit needs at least two points"));
    }
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(ys.len());
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(Error::domain(format!(
                "slope fit needs positive values, got ({x}, {y}) at index {i}"
            )));
        }
        lx.push(x.ln());
        ly.push(y.ln());
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::domain("slope fit needs at least two distinct x values"));
    }
    Ok(sxy / sxx)
}
