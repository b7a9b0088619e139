//! Adaptive Gauss-Legendre quadrature on finite intervals.
//!
//! Nodes and weights are computed once per rule order by Newton iteration on
//! the Legendre polynomial (see e.g. Numerical Recipes, 4.6). Panels are
//! bisected until the coarse/fine estimates agree to the requested absolute
//! tolerance.

/// Gauss-Legendre nodes and weights on (-1, 1) for an `order`-point rule.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2, "rule order must be at least 2");
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and its derivative by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn panel(f: &dyn Fn(f64) -> f64, a: f64, b: f64, nodes: &[f64], weights: &[f64]) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (&x, &w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    half * acc
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
///
/// On failure (bisection depth exhausted) returns the achieved residual so
/// the caller can report how far the quadrature got.
pub(crate) fn integrate(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    order: usize,
    tol: f64,
    max_depth: u32,
) -> std::result::Result<f64, f64> {
    let (nodes, weights) = gauss_legendre(order.max(4));
    refine(f, a, b, &nodes, &weights, tol, max_depth)
}

/// Panels whose coarse/fine residual is below this are accepted regardless
/// of the (halved) local tolerance; splitting further cannot improve on
/// f64 resolution and would only starve the depth budget near endpoint
/// singularities.
const RESIDUAL_FLOOR: f64 = 1e-18;

fn refine(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    nodes: &[f64],
    weights: &[f64],
    tol: f64,
    depth: u32,
) -> std::result::Result<f64, f64> {
    let coarse = panel(f, a, b, nodes, weights);
    let mid = 0.5 * (a + b);
    let fine = panel(f, a, mid, nodes, weights) + panel(f, mid, b, nodes, weights);
    let residual = (fine - coarse).abs();
    if residual <= tol.max(RESIDUAL_FLOOR) {
        return Ok(fine);
    }
    if depth == 0 {
        return Err(residual);
    }
    let left = refine(f, a, mid, nodes, weights, 0.5 * tol, depth - 1)?;
    let right = refine(f, mid, b, nodes, weights, 0.5 * tol, depth - 1)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre(6);
        // 6-point rule is exact through degree 11.
        let value = panel(&|x: f64| x.powi(10), -1.0, 1.0, &nodes, &weights);
        assert!((value - 2.0 / 11.0).abs() < 1e-14);
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_square_root_endpoint() {
        let value = integrate(&|x: f64| x.sqrt(), 0.0, 1.0, 12, 1e-12, 40).unwrap();
        assert!((value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn depth_exhaustion_reports_residual() {
        let res = integrate(&|x: f64| (1.0 / x.max(1e-300)).sin(), 0.0, 1.0, 4, 1e-14, 2);
        assert!(res.is_err());
    }
}
