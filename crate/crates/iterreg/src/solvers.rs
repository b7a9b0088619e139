//! The three iterations run against a normalized Gram operator.
//!
//! All solvers work in coefficient space: given the symmetric positive
//! semidefinite operator `M = K_hat / n` and labels `y`, the iterate after
//! `t` steps equals `g_t(M) y` for the method's filter polynomial, which is
//! what [`spectral_solution`] computes directly through an
//! eigendecomposition and what every equivalence test checks against.
//! Predictions on arbitrary points are `f_hat = (1/n) K_cross u_t`.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::filters::{nesterov_beta, nu_params, FilterMethod, MethodKind};
use crate::spectral::{apply_filter, EigenDecomposition};

/// Abort threshold of the divergence detector, relative to `||y||`.
const DIVERGENCE_FACTOR: f64 = 1e6;

/// Coefficient iterates `u_0, ..., u_T` of one solver run.
#[derive(Clone, Debug)]
pub struct IterateHistory {
    method: FilterMethod,
    iterates: Vec<Array1<f64>>,
}

impl IterateHistory {
    pub fn method(&self) -> &FilterMethod {
        &self.method
    }

    pub fn t_max(&self) -> usize {
        self.iterates.len() - 1
    }

    /// The iterate `u_t`.
    pub fn at(&self, t: usize) -> &Array1<f64> {
        &self.iterates[t]
    }
}

fn check_operator(m: &Array2<f64>, y: &Array1<f64>, kappa_sq: f64) -> Result<()> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::domain(format!("operator must be square, got {rows} x {cols}")));
    }
    if y.len() != rows {
        return Err(Error::domain(format!(
            "label vector length {} does not match operator dimension {rows}",
            y.len()
        )));
    }
    let mut scale = 0.0_f64;
    for &v in m.iter() {
        if !v.is_finite() {
            return Err(Error::domain("operator contains non-finite entries"));
        }
        scale = scale.max(v.abs());
    }
    for i in 0..rows {
        for j in (i + 1)..rows {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::domain("operator is not symmetric"));
            }
        }
    }
    // Diagonal entries are Rayleigh quotients, so this catches a declared
    // spectral bound that is certainly below the operator norm.
    for i in 0..rows {
        if m[(i, i)] > kappa_sq * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "operator diagonal entry {} exceeds the declared kappa_sq = {kappa_sq}",
                m[(i, i)]
            )));
        }
    }
    Ok(())
}

/// Core momentum recursion. Producing `u_{t+1}` from `(u_t, u_{t-1})` asks
/// `params(t + 1)` for the step and momentum weights; with
/// `extrapolated_gradient` the gradient is taken at the extrapolated point
/// `v_t = u_t + beta (u_t - u_{t-1})` (Nesterov), otherwise at `u_t`
/// (gradient descent and heavy-ball).
pub(crate) fn iterate_filter<P, V>(
    m: &Array2<f64>,
    y: &Array1<f64>,
    t_max: usize,
    params: P,
    extrapolated_gradient: bool,
    mut visit: V,
) -> Result<()>
where
    P: Fn(usize) -> (f64, f64),
    V: FnMut(usize, &Array1<f64>),
{
    let n = y.len();
    let y_norm = y.dot(y).sqrt();
    let mut u_prev = Array1::zeros(n);
    let mut u = Array1::zeros(n);
    visit(0, &u);
    for step in 1..=t_max {
        let (alpha, beta) = params(step);
        let u_next = if extrapolated_gradient {
            let v = &u + &(beta * (&u - &u_prev));
            &v + &(alpha * (y - &m.dot(&v)))
        } else {
            &u + &(alpha * (y - &m.dot(&u))) + &(beta * (&u - &u_prev))
        };
        let norm = u_next.dot(&u_next).sqrt();
        if !norm.is_finite() || norm > DIVERGENCE_FACTOR * y_norm {
            return Err(Error::numeric(format!(
                "iterate norm {norm:e} exceeded {DIVERGENCE_FACTOR:e} * ||y|| at t = {step}; the step size is too large for this operator"
            )));
        }
        u_prev = std::mem::replace(&mut u, u_next);
        visit(step, &u);
    }
    Ok(())
}

/// Run `method` on `(M, y)` for `t_max` steps, keeping the full history.
///
/// For error curves over many iterations prefer [`run_with`], which streams
/// the iterates instead of storing them.
pub fn run(method: &FilterMethod, m: &Array2<f64>, y: &Array1<f64>, t_max: usize) -> Result<IterateHistory> {
    let mut iterates = Vec::with_capacity(t_max + 1);
    run_with(method, m, y, t_max, |_, u| iterates.push(u.clone()))?;
    Ok(IterateHistory { method: *method, iterates })
}

/// Streaming variant of [`run`]: `visit(t, u_t)` is called for `t = 0..=t_max`
/// and only a two-deep window of iterates is kept internally.
pub fn run_with<V>(
    method: &FilterMethod,
    m: &Array2<f64>,
    y: &Array1<f64>,
    t_max: usize,
    visit: V,
) -> Result<()>
where
    V: FnMut(usize, &Array1<f64>),
{
    check_operator(m, y, method.kappa_sq())?;
    match method.kind() {
        MethodKind::GradientDescent => {
            let alpha = method.step().expect("gradient descent has a step");
            iterate_filter(m, y, t_max, |_| (alpha, 0.0), false, visit)
        }
        MethodKind::NuMethod => {
            let nu = method.nu().expect("nu-method has nu");
            let kappa_sq = method.kappa_sq();
            iterate_filter(
                m,
                y,
                t_max,
                |step| nu_params(step, nu, kappa_sq).expect("step >= 1"),
                false,
                visit,
            )
        }
        MethodKind::Nesterov => {
            let alpha = method.step().expect("nesterov has a step");
            let beta = method.momentum().expect("nesterov has beta");
            iterate_filter(
                m,
                y,
                t_max,
                |step| {
                    // u_{t+1} extrapolates with beta_t, where t = step - 1.
                    let b = if step == 1 { 0.0 } else { nesterov_beta(step - 1, beta).expect("t >= 1") };
                    (alpha, b)
                },
                true,
                visit,
            )
        }
    }
}

/// Gradient descent `u_{t+1} = u_t + alpha (y - M u_t)` with `u_0 = 0`.
/// The declared spectral bound is `1/alpha`, the largest admissible.
pub fn run_gd(m: &Array2<f64>, y: &Array1<f64>, alpha: f64, t_max: usize) -> Result<IterateHistory> {
    let method = FilterMethod::gradient_descent(alpha, 1.0 / alpha)?;
    run(&method, m, y, t_max)
}

/// The nu-method: heavy-ball with the varying parameters of
/// [`nu_params`], `u_{t+1} = u_t + alpha_{t+1}(y - M u_t) + beta_{t+1}(u_t - u_{t-1})`.
pub fn run_heavy_ball(
    m: &Array2<f64>,
    y: &Array1<f64>,
    nu: f64,
    kappa_sq: f64,
    t_max: usize,
) -> Result<IterateHistory> {
    let method = FilterMethod::nu_method(nu, kappa_sq)?;
    run(&method, m, y, t_max)
}

/// Nesterov acceleration with constant step `alpha` and momentum sequence
/// `beta_t = (t-1)/(t+beta)`. The declared spectral bound defaults to just
/// under `1/alpha`; use [`run`] with an explicit [`FilterMethod`] to declare
/// a tighter one.
pub fn run_nesterov(
    m: &Array2<f64>,
    y: &Array1<f64>,
    alpha: f64,
    beta: f64,
    t_max: usize,
) -> Result<IterateHistory> {
    let method = FilterMethod::nesterov(alpha, beta, (1.0 - 1e-9) / alpha)?;
    run(&method, m, y, t_max)
}

/// Closed-form solution `g_t(M) y` through the eigendecomposition of `M`.
/// This is the oracle all iterate equivalence tests compare against.
pub fn spectral_solution(
    method: &FilterMethod,
    t: usize,
    eig: &EigenDecomposition,
    y: &Array1<f64>,
) -> Result<Array1<f64>> {
    apply_filter(method, t, eig, y)
}

/// Predictions `f_hat = (1/n) K_cross u` from coefficients `u` of a sample of
/// size `n`; `K_cross` holds kernel values between evaluation points (rows)
/// and sample points (columns).
pub fn predict(cross_kernel: &Array2<f64>, u: &Array1<f64>, n: usize) -> Result<Array1<f64>> {
    if cross_kernel.ncols() != u.len() || u.len() != n {
        return Err(Error::domain(format!(
            "prediction shape mismatch: cross kernel is {} x {}, coefficients {}, sample size {n}",
            cross_kernel.nrows(),
            cross_kernel.ncols(),
            u.len()
        )));
    }
    Ok(cross_kernel.dot(u) / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sym_eig;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn random_psd(n: usize, seed: u64) -> Array2<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut b = Array2::zeros((n, n));
        for v in b.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let psd = b.dot(&b.t()) / n as f64;
        // Exact symmetry regardless of the multiply's summation order.
        let mut sym = psd.clone();
        for i in 0..n {
            for j in 0..n {
                sym[(i, j)] = 0.5 * (psd[(i, j)] + psd[(j, i)]);
            }
        }
        sym
    }

    fn random_vector(n: usize, seed: u64) -> Array1<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        Array1::from_iter((0..n).map(|_| rng.random_range(-1.0..1.0)))
    }

    fn methods_for(kappa_sq: f64) -> Vec<FilterMethod> {
        vec![
            FilterMethod::gradient_descent(1.0 / kappa_sq, kappa_sq).unwrap(),
            FilterMethod::nu_method(1.0, kappa_sq).unwrap(),
            FilterMethod::nesterov(0.99 / kappa_sq, 1.0, kappa_sq).unwrap(),
        ]
    }

    #[test]
    fn first_steps_match_hand_values() {
        let m = array![[0.5]];
        let y = array![1.0];
        let gd = run_gd(&m, &y, 1.0, 2).unwrap();
        assert!((gd.at(1)[0] - 1.0).abs() < 1e-15);
        assert!((gd.at(2)[0] - 1.5).abs() < 1e-15);

        let hb = run_heavy_ball(&m, &y, 1.0, 1.0, 1).unwrap();
        assert!((hb.at(1)[0] - 1.2).abs() < 1e-15);
        // Training residual equals the filter residual: 1 - 0.5 u_1 = r_1(0.5).
        assert!((1.0 - 0.5 * hb.at(1)[0] - 0.4).abs() < 1e-15);

        let nest = run_nesterov(&m, &y, 1.0 - 1e-12, 1.0, 3).unwrap();
        assert!((nest.at(1)[0] - (1.0 - 1e-12)).abs() < 1e-12);
        assert!((nest.at(3)[0] - 11.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn identity_operator_is_fixed_point_for_gd() {
        let m = Array2::eye(4);
        let y = random_vector(4, 9);
        let history = run_gd(&m, &y, 1.0, 6).unwrap();
        assert!(history.at(0).iter().all(|&v| v == 0.0));
        for t in 1..=6 {
            for (a, b) in history.at(t).iter().zip(&y) {
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn iterates_match_spectral_oracle() {
        for (n, seed) in [(5usize, 1u64), (10, 2), (20, 3)] {
            let m = random_psd(n, seed);
            let y = random_vector(n, seed + 100);
            let eig = sym_eig(&m).unwrap();
            let kappa_sq = eig.eigenvalues()[0] * 1.05;
            for method in methods_for(kappa_sq) {
                let history = run(&method, &m, &y, 25).unwrap();
                for t in [1usize, 7, 25] {
                    let oracle = spectral_solution(&method, t, &eig, &y).unwrap();
                    let diff = (history.at(t) - &oracle).mapv(|v| v * v).sum().sqrt();
                    let u = history.at(t);
                    let scale = u.dot(u).sqrt().max(y.dot(&y).sqrt());
                    assert!(
                        diff <= 1e-8 * scale,
                        "{} n={n} t={t}: |u - oracle| = {diff:e}",
                        method.label()
                    );
                }
            }
        }
    }

    #[test]
    fn diagonal_operator_gives_per_coordinate_filter_values() {
        let diag = [0.9, 0.4, 0.05, 0.0];
        let m = Array2::from_diag(&ndarray::arr1(&diag));
        let y = array![1.0, -2.0, 0.5, 3.0];
        let eig = sym_eig(&m).unwrap();
        for method in methods_for(1.0) {
            let solution = spectral_solution(&method, 9, &eig, &y).unwrap();
            let (g, _) = crate::filters::filter_values(&method, &diag, 9).unwrap();
            for i in 0..4 {
                assert!(
                    (solution[i] - g[i] * y[i]).abs() <= 1e-12,
                    "{} coordinate {i}",
                    method.label()
                );
            }
        }
    }

    #[test]
    fn zero_momentum_reduces_to_gradient_descent() {
        let m = random_psd(8, 5);
        let y = random_vector(8, 6);
        let alpha = 0.3;
        let gd = run_gd(&m, &y, alpha, 15).unwrap();
        for extrapolated in [false, true] {
            let mut iterates = Vec::new();
            iterate_filter(&m, &y, 15, |_| (alpha, 0.0), extrapolated, |_, u| iterates.push(u.clone()))
                .unwrap();
            for (t, iterate) in iterates.iter().enumerate() {
                let diff = (iterate - gd.at(t)).mapv(f64::abs).sum();
                assert!(diff == 0.0, "extrapolated={extrapolated} t={t} diff={diff}");
            }
        }
    }

    #[test]
    fn predictions_and_training_residual() {
        let zeros = Array1::zeros(3);
        let cross = Array2::from_shape_fn((5, 3), |(i, j)| (i + j) as f64);
        let out = predict(&cross, &zeros, 3).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
        assert!(predict(&cross, &zeros, 4).is_err());

        // Evaluation at the sample points: f_hat = (K_hat / n) u = M u.
        let gram = random_psd(6, 8) * 6.0;
        let m = &gram / 6.0;
        let u = random_vector(6, 4);
        let f_hat = predict(&gram, &u, 6).unwrap();
        let direct = m.dot(&u);
        for (a, b) in f_hat.iter().zip(&direct) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_linear_toy_interpolates() {
        // 20 nearly-orthonormal points: the full-sample Gram is positive
        // definite, so r_t(M) -> 0 and predictions converge to the target.
        let n = 20;
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let mut points = Array2::eye(n);
        for v in points.iter_mut() {
            *v += 0.1 * rng.random_range(-1.0..1.0);
        }
        let w_star = random_vector(n, 78);
        let y = points.dot(&w_star);
        let (gram, kappa_sq) = crate::kernels::gram(&points.view(), &crate::kernels::Kernel::Linear).unwrap();
        let m = &gram / n as f64;
        let history = run_gd(&m, &y, 1.0 / kappa_sq, 2000).unwrap();
        let f_hat = predict(&gram, history.at(2000), n).unwrap();
        let worst = f_hat.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0_f64, f64::max);
        assert!(worst <= 1e-3, "max |f_hat - f_H| = {worst:e}");
    }

    #[test]
    fn feature_space_recursion_matches_predict() {
        // Linear kernel: iterate w in feature space and compare <w_t, z>
        // against the coefficient-space prediction.
        let (n, d) = (12, 4);
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let mut points = Array2::zeros((n, d));
        for v in points.iter_mut() {
            *v = rng.random_range(-1.0..1.0);
        }
        let y = random_vector(n, 32);
        let (gram, kappa_sq) = crate::kernels::gram(&points.view(), &crate::kernels::Kernel::Linear).unwrap();
        let alpha = 1.0 / kappa_sq;
        let m = &gram / n as f64;
        let history = run_gd(&m, &y, alpha, 60).unwrap();

        // w_{t+1} = w_t - alpha (Sigma_hat w_t - X* y).
        let sigma_hat = points.t().dot(&points) / n as f64;
        let xty = points.t().dot(&y) / n as f64;
        let mut w = Array1::zeros(d);
        for _ in 0..60 {
            w = &w + &(alpha * (&xty - &sigma_hat.dot(&w)));
        }
        let eval_points = {
            let mut z = Array2::zeros((7, d));
            for v in z.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            z
        };
        let cross = eval_points.dot(&points.t());
        let from_coeffs = predict(&cross, history.at(60), n).unwrap();
        let from_features = eval_points.dot(&w);
        for (a, b) in from_coeffs.iter().zip(&from_features) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn divergence_detector_fires() {
        let m = array![[1.0, 0.0], [0.0, 1.0]];
        let y = array![1.0, 1.0];
        // alpha = 4 on unit spectrum: |1 - alpha| = 3 > 1, iterates blow up.
        let method = FilterMethod::unchecked(crate::filters::Variant::Gd { alpha: 4.0, kappa_sq: 1.0 });
        // Bypass the diagonal check by declaring kappa_sq = 1: diag equals 1.
        let err = run(&method, &m, &y, 100).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)), "{err}");
    }

    #[test]
    fn operator_validation() {
        let y = array![1.0, 1.0];
        let asym = array![[1.0, 0.5], [0.0, 1.0]];
        assert!(run_gd(&asym, &y, 0.5, 3).is_err());
        let m = array![[1.0, 0.0], [0.0, 3.0]];
        // Diagonal entry 3 exceeds the declared bound 1/alpha = 2.
        assert!(run_gd(&m, &y, 0.5, 3).is_err());
    }
}
