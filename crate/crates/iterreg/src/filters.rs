//! Spectral filter polynomials of the three iterations.
//!
//! For least squares, every iteration count `t` of gradient descent, of the
//! nu-method (heavy-ball with varying parameters) and of Nesterov
//! acceleration defines a polynomial filter `g_t` applied to the spectrum of
//! the empirical covariance operator, together with the residual
//! `r_t(sigma) = 1 - sigma * g_t(sigma)`. This module evaluates both on
//! scalar grids through the exact recursions:
//!
//! - gradient descent: `g_{t+1} = g_t + alpha * r_t`,
//!   `r_{t+1} = (1 - alpha*sigma) * r_t`;
//! - nu-method: `r_{t+1} = r_t + beta_{t+1}(r_t - r_{t-1}) - alpha_{t+1} sigma r_t`
//!   with the rational parameter sequences of [`nu_params`] (the residuals are
//!   normalized shifted Jacobi polynomials, see [`jacobi_orthogonality`]);
//! - Nesterov: `g_{t+1} = (1-alpha*sigma)[g_t + beta_t(g_t - g_{t-1})] + alpha`,
//!   `r_{t+1} = (1-alpha*sigma)[r_t + beta_t(r_t - r_{t-1})]` with
//!   `beta_t = (t-1)/(t+beta)`.
//!
//! The regularization parameter associated with `t` is `lambda = 1/t` for
//! gradient descent and `lambda = 1/t^2` for the two accelerated methods;
//! [`qualification_sup`] and [`qualification_slope`] measure how fast
//! `sup_sigma sigma^q |r_t(sigma)|` decays in `t`, which is what the
//! qualification of a filter quantifies.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::fitting::loglog_slope;
use crate::quad;

/// Hard cap on iteration counts accepted by trace construction; the
/// recursions run in 64-bit floats and are not meant for longer horizons.
pub const MAX_TRACE_LEN: usize = 1_000_000;

/// Which of the three iterations a [`FilterMethod`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodKind {
    GradientDescent,
    NuMethod,
    Nesterov,
}

impl MethodKind {
    /// Short label used in CSV output and reports.
    pub fn label(self) -> &'static str {
        match self {
            MethodKind::GradientDescent => "gd",
            MethodKind::NuMethod => "nu",
            MethodKind::Nesterov => "nesterov",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Variant {
    Gd { alpha: f64, kappa_sq: f64 },
    Nu { nu: f64, kappa_sq: f64 },
    Nesterov { alpha: f64, beta: f64, kappa_sq: f64 },
}

/// One of the three iterations together with its hyperparameters and the
/// declared spectral bound `kappa_sq` (an upper bound on the eigenvalues the
/// filter will be applied to).
///
/// Construction enforces the step-size conditions: `alpha * kappa_sq <= 1`
/// for gradient descent and `alpha * kappa_sq < 1` for Nesterov. The
/// nu-method accepts any positive `kappa_sq`, but its uniform bound constants
/// are only certified for `kappa_sq <= 1`; see [`FilterMethod::bounds_certified`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterMethod {
    variant: Variant,
}

impl FilterMethod {
    pub fn gradient_descent(alpha: f64, kappa_sq: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("gradient descent needs step alpha > 0, got {alpha}")));
        }
        if !(kappa_sq > 0.0) || !kappa_sq.is_finite() {
            return Err(Error::domain(format!("kappa_sq must be positive, got {kappa_sq}")));
        }
        if alpha * kappa_sq > 1.0 + 1e-12 {
            return Err(Error::domain(format!(
                "gradient descent needs alpha * kappa_sq <= 1, got {}",
                alpha * kappa_sq
            )));
        }
        Ok(Self { variant: Variant::Gd { alpha, kappa_sq } })
    }

    pub fn nu_method(nu: f64, kappa_sq: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::domain(format!("nu-method needs nu > 0, got {nu}")));
        }
        if !(kappa_sq > 0.0) || !kappa_sq.is_finite() {
            return Err(Error::domain(format!("kappa_sq must be positive, got {kappa_sq}")));
        }
        Ok(Self { variant: Variant::Nu { nu, kappa_sq } })
    }

    pub fn nesterov(alpha: f64, beta: f64, kappa_sq: f64) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::domain(format!("nesterov needs step alpha > 0, got {alpha}")));
        }
        if !(beta >= 1.0) {
            return Err(Error::domain(format!("nesterov needs beta >= 1, got {beta}")));
        }
        if !(kappa_sq > 0.0) || !kappa_sq.is_finite() {
            return Err(Error::domain(format!("kappa_sq must be positive, got {kappa_sq}")));
        }
        if !(alpha * kappa_sq < 1.0) {
            return Err(Error::domain(format!(
                "nesterov needs alpha * kappa_sq < 1, got {}",
                alpha * kappa_sq
            )));
        }
        Ok(Self { variant: Variant::Nesterov { alpha, beta, kappa_sq } })
    }

    /// Bypasses the construction checks. Used by the verification suite to
    /// inject deliberately faulty hyperparameters and watch the bounds fail.
    pub(crate) fn unchecked(variant: Variant) -> Self {
        Self { variant }
    }

    pub fn kind(&self) -> MethodKind {
        match self.variant {
            Variant::Gd { .. } => MethodKind::GradientDescent,
            Variant::Nu { .. } => MethodKind::NuMethod,
            Variant::Nesterov { .. } => MethodKind::Nesterov,
        }
    }

    pub fn label(&self) -> &'static str {
        self.kind().label()
    }

    pub fn kappa_sq(&self) -> f64 {
        match self.variant {
            Variant::Gd { kappa_sq, .. }
            | Variant::Nu { kappa_sq, .. }
            | Variant::Nesterov { kappa_sq, .. } => kappa_sq,
        }
    }

    /// Constant step size, when the method has one.
    pub fn step(&self) -> Option<f64> {
        match self.variant {
            Variant::Gd { alpha, .. } | Variant::Nesterov { alpha, .. } => Some(alpha),
            Variant::Nu { .. } => None,
        }
    }

    /// Momentum parameter `beta` of Nesterov acceleration.
    pub fn momentum(&self) -> Option<f64> {
        match self.variant {
            Variant::Nesterov { beta, .. } => Some(beta),
            _ => None,
        }
    }

    pub fn nu(&self) -> Option<f64> {
        match self.variant {
            Variant::Nu { nu, .. } => Some(nu),
            _ => None,
        }
    }

    pub fn is_accelerated(&self) -> bool {
        !matches!(self.variant, Variant::Gd { .. })
    }

    /// Whether the uniform bound constants (`F_0 = 1`, `E`, `F_q`) quoted by
    /// the verification suite apply. For the nu-method they are stated for
    /// `kappa <= 1` only.
    pub fn bounds_certified(&self) -> bool {
        match self.variant {
            Variant::Nu { kappa_sq, .. } => kappa_sq <= 1.0 + 1e-12,
            _ => true,
        }
    }

    /// Regularization parameter associated with iteration `t`: `1/t` for
    /// gradient descent, `1/t^2` for the accelerated methods, and `1` at
    /// `t = 0` by convention (the mapping is only meaningful for `t >= 1`).
    pub fn lambda_of(&self, t: usize) -> f64 {
        if t == 0 {
            return 1.0;
        }
        let tf = t as f64;
        if self.is_accelerated() {
            1.0 / (tf * tf)
        } else {
            1.0 / tf
        }
    }
}

/// Step and momentum parameters `(alpha_t, beta_t)` of the nu-method at
/// iteration `t >= 1`, carrying the `1/kappa_sq` scaling on `alpha_t`.
///
/// `t = 1` gives `((4 nu + 2) / ((4 nu + 1) kappa_sq), 0)`; for `t > 1` both
/// parameters are ratios of quadratics in `t` converging to `4/kappa_sq` and
/// `1` respectively.
pub fn nu_params(t: usize, nu: f64, kappa_sq: f64) -> Result<(f64, f64)> {
    if t < 1 {
        return Err(Error::domain("nu-method parameters are defined for t >= 1"));
    }
    if !(nu > 0.0) {
        return Err(Error::domain(format!("nu-method needs nu > 0, got {nu}")));
    }
    if !(kappa_sq > 0.0) {
        return Err(Error::domain(format!("kappa_sq must be positive, got {kappa_sq}")));
    }
    Ok(nu_params_unchecked(t, nu, kappa_sq))
}

fn nu_params_unchecked(t: usize, nu: f64, kappa_sq: f64) -> (f64, f64) {
    if t == 1 {
        return ((4.0 * nu + 2.0) / ((4.0 * nu + 1.0) * kappa_sq), 0.0);
    }
    let tf = t as f64;
    let alpha = 4.0 / kappa_sq * ((2.0 * tf + 2.0 * nu - 1.0) * (tf + nu - 1.0))
        / ((tf + 2.0 * nu - 1.0) * (2.0 * tf + 4.0 * nu - 1.0));
    let beta = ((tf - 1.0) * (2.0 * tf - 3.0) * (2.0 * tf + 2.0 * nu - 1.0))
        / ((tf + 2.0 * nu - 1.0) * (2.0 * tf + 4.0 * nu - 1.0) * (2.0 * tf + 2.0 * nu - 3.0));
    (alpha, beta)
}

/// Momentum weight `beta_t = (t - 1) / (t + beta)` of Nesterov acceleration,
/// for `t >= 1` and `beta >= 1`. Non-decreasing in `t` and always in `[0, 1)`.
pub fn nesterov_beta(t: usize, beta: f64) -> Result<f64> {
    if t < 1 {
        return Err(Error::domain("nesterov momentum sequence is defined for t >= 1"));
    }
    if !(beta >= 1.0) {
        return Err(Error::domain(format!("nesterov needs beta >= 1, got {beta}")));
    }
    Ok((t as f64 - 1.0) / (t as f64 + beta))
}

/// Scalar recursion state at a single spectral point, shared by trace
/// construction, the verification suite and the eigenbasis oracle.
///
/// Valid for any `sigma >= 0`; the nu-method filter value is advanced through
/// the identity written incrementally,
/// `g_{t+1} = g_t + beta_{t+1}(g_t - g_{t-1}) + alpha_{t+1}(1 - sigma g_t)`,
/// which is the residual recursion rearranged and stays finite at `sigma = 0`.
#[derive(Clone, Debug)]
pub(crate) struct ScalarRecursion {
    variant: Variant,
    sigma: f64,
    t: usize,
    g_prev: f64,
    g: f64,
    r_prev: f64,
    r: f64,
}

impl ScalarRecursion {
    pub(crate) fn new(method: &FilterMethod, sigma: f64) -> Self {
        Self {
            variant: method.variant,
            sigma,
            t: 0,
            g_prev: 0.0,
            g: 0.0,
            r_prev: 1.0,
            r: 1.0,
        }
    }

    pub(crate) fn g(&self) -> f64 {
        self.g
    }

    pub(crate) fn r(&self) -> f64 {
        self.r
    }

    /// Advance from `t` to `t + 1`.
    pub(crate) fn advance(&mut self) -> Result<()> {
        let sigma = self.sigma;
        let (g_next, r_next) = match self.variant {
            Variant::Gd { alpha, .. } => {
                (self.g + alpha * self.r, (1.0 - alpha * sigma) * self.r)
            }
            Variant::Nu { nu, kappa_sq } => {
                let (a, b) = nu_params_unchecked(self.t + 1, nu, kappa_sq);
                let g_next = self.g + b * (self.g - self.g_prev) + a * (1.0 - sigma * self.g);
                let r_next = self.r + b * (self.r - self.r_prev) - a * sigma * self.r;
                (g_next, r_next)
            }
            Variant::Nesterov { alpha, beta, .. } => {
                // u_{t+1} uses beta_t; beta_0 is irrelevant (r_0 = r_{-1}).
                let b = if self.t == 0 { 0.0 } else { (self.t as f64 - 1.0) / (self.t as f64 + beta) };
                let damp = 1.0 - alpha * sigma;
                let g_next = damp * (self.g + b * (self.g - self.g_prev)) + alpha;
                let r_next = damp * (self.r + b * (self.r - self.r_prev));
                (g_next, r_next)
            }
        };
        if !g_next.is_finite() || !r_next.is_finite() {
            return Err(Error::numeric(format!(
                "filter recursion overflowed at t = {}, sigma = {:e}",
                self.t + 1,
                sigma
            )));
        }
        self.g_prev = self.g;
        self.r_prev = self.r;
        self.g = g_next;
        self.r = r_next;
        self.t += 1;
        Ok(())
    }
}

/// Filter and residual values of one method sampled on a sigma grid for all
/// iterations `t = 0..=t_max`.
#[derive(Clone, Debug)]
pub struct FilterTrace {
    method: FilterMethod,
    sigma: Vec<f64>,
    lambda: Vec<f64>,
    g: Array2<f64>,
    r: Array2<f64>,
}

impl FilterTrace {
    pub fn method(&self) -> &FilterMethod {
        &self.method
    }

    pub fn sigma_grid(&self) -> &[f64] {
        &self.sigma
    }

    pub fn t_max(&self) -> usize {
        self.g.nrows() - 1
    }

    /// Regularization parameter for row `t` (`1` at `t = 0`).
    pub fn lambda_at(&self, t: usize) -> f64 {
        self.lambda[t]
    }

    pub fn g_at(&self, t: usize, grid_index: usize) -> f64 {
        self.g[(t, grid_index)]
    }

    pub fn r_at(&self, t: usize, grid_index: usize) -> f64 {
        self.r[(t, grid_index)]
    }

    pub fn g_row(&self, t: usize) -> ndarray::ArrayView1<'_, f64> {
        self.g.row(t)
    }

    pub fn r_row(&self, t: usize) -> ndarray::ArrayView1<'_, f64> {
        self.r.row(t)
    }
}

fn validate_grid(sigma_grid: &[f64], kappa_sq: f64) -> Result<()> {
    if sigma_grid.is_empty() {
        return Err(Error::domain("sigma grid must not be empty"));
    }
    let mut prev = 0.0;
    for (j, &s) in sigma_grid.iter().enumerate() {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::domain(format!("sigma grid values must be in (0, kappa_sq], got {s} at index {j}")));
        }
        if s > kappa_sq * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "sigma grid value {s} at index {j} exceeds kappa_sq = {kappa_sq}"
            )));
        }
        if j > 0 && s <= prev {
            return Err(Error::domain(format!("sigma grid must be strictly increasing, violated at index {j}")));
        }
        prev = s;
    }
    Ok(())
}

/// Evaluate `g_t` and `r_t` of `method` on `sigma_grid` for `t = 0..=t_max`
/// by running the exact recursions at every grid point.
pub fn filter_trace(method: &FilterMethod, sigma_grid: &[f64], t_max: usize) -> Result<FilterTrace> {
    if t_max < 1 {
        return Err(Error::domain("filter traces need t_max >= 1"));
    }
    if t_max > MAX_TRACE_LEN {
        return Err(Error::domain(format!("t_max {t_max} exceeds the cap of {MAX_TRACE_LEN}")));
    }
    validate_grid(sigma_grid, method.kappa_sq())?;
    let cols = sigma_grid.len();
    let mut g = Array2::zeros((t_max + 1, cols));
    let mut r = Array2::zeros((t_max + 1, cols));
    for (j, &sigma) in sigma_grid.iter().enumerate() {
        let mut scan = ScalarRecursion::new(method, sigma);
        g[(0, j)] = 0.0;
        r[(0, j)] = 1.0;
        for t in 1..=t_max {
            scan.advance()?;
            g[(t, j)] = scan.g();
            r[(t, j)] = scan.r();
        }
    }
    let lambda = (0..=t_max).map(|t| method.lambda_of(t)).collect();
    Ok(FilterTrace { method: *method, sigma: sigma_grid.to_vec(), lambda, g, r })
}

/// Filter values `g_t(sigma_i)` and residuals `r_t(sigma_i)` at a single
/// iteration `t`, for arbitrary (not necessarily sorted) points in
/// `[0, kappa_sq]`. This is the evaluation path used when applying a filter
/// to the eigenvalues of an operator.
pub fn filter_values(method: &FilterMethod, sigmas: &[f64], t: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let kappa_sq = method.kappa_sq();
    let mut g = Vec::with_capacity(sigmas.len());
    let mut r = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        if !(sigma >= 0.0) || sigma > kappa_sq * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "filter evaluation needs sigma in [0, kappa_sq = {kappa_sq}], got {sigma}"
            )));
        }
        let mut scan = ScalarRecursion::new(method, sigma);
        for _ in 0..t {
            scan.advance()?;
        }
        g.push(scan.g());
        r.push(scan.r());
    }
    Ok((g, r))
}

/// Grid suprema `s_q(t) = max_sigma sigma^q |r_t(sigma)|` for `t = 1..=t_max`;
/// entry `i` of the result corresponds to `t = i + 1`.
pub fn qualification_sup(trace: &FilterTrace, q: f64) -> Result<Vec<f64>> {
    if !(q >= 0.0) || !q.is_finite() {
        return Err(Error::domain(format!("qualification power q must be >= 0, got {q}")));
    }
    let weights: Vec<f64> = trace.sigma.iter().map(|&s| s.powf(q)).collect();
    let t_max = trace.t_max();
    let mut sup = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let row = trace.r.row(t);
        let mut best = 0.0_f64;
        for (&w, &r) in weights.iter().zip(row) {
            best = best.max(w * r.abs());
        }
        sup.push(best);
    }
    Ok(sup)
}

/// Least-squares slope of `log s(t)` against `log t` over the window
/// `[t_min, t_max]`, where `s` is indexed as produced by
/// [`qualification_sup`] (`s[0]` is `t = 1`).
pub fn qualification_slope(s: &[f64], t_min: usize, t_max: usize) -> Result<f64> {
    if t_min < 1 || t_max > s.len() {
        return Err(Error::domain(format!(
            "slope window [{t_min}, {t_max}] out of range for {} samples",
            s.len()
        )));
    }
    if t_max < 2 * t_min {
        return Err(Error::domain("slope window must span at least a factor of two in t"));
    }
    let mut xs = Vec::with_capacity(t_max - t_min + 1);
    let mut ys = Vec::with_capacity(t_max - t_min + 1);
    for t in t_min..=t_max {
        let v = s[t - 1];
        if !(v > 0.0) {
            return Err(Error::domain(format!("slope window contains non-positive value {v} at t = {t}")));
        }
        xs.push(t as f64);
        ys.push(v);
    }
    loglog_slope(&xs, &ys)
}

/// The auxiliary sequence of the Nesterov residual analysis together with
/// the two bounds it certifies.
///
/// `R_t` evolves by `R_{t+1} = -(alpha sigma / theta_t)(1 - theta_t) r_t
/// + (1 - alpha sigma) R_t` with `R_0 = 1` and `theta_t = beta / (t + beta)`;
/// the residuals then satisfy `|R_t| <= 1` and
/// `sigma r_t^2 <= (theta_{t-1}^2 / alpha)(1 - alpha sigma)^{t+1}` pointwise.
#[derive(Clone, Debug)]
pub struct NesterovAuxiliary {
    pub sigma: Vec<f64>,
    /// Rows `t = 0..=t_max` of `R_t` on the grid.
    pub aux: Array2<f64>,
    /// `max |R_t(sigma)|` over the whole table.
    pub max_abs_aux: f64,
    /// `max` over `t >= 1` and the grid of
    /// `sigma r_t^2 - (theta_{t-1}^2 / alpha)(1 - alpha sigma)^{t+1}`.
    pub max_pointwise_margin: f64,
}

/// Evaluate the auxiliary polynomials `R_t` and the margin of the pointwise
/// residual bound for Nesterov acceleration with constant step `alpha` and
/// momentum parameter `beta`.
pub fn nesterov_auxiliary(sigma_grid: &[f64], t_max: usize, alpha: f64, beta: f64) -> Result<NesterovAuxiliary> {
    if t_max < 1 {
        return Err(Error::domain("nesterov auxiliary needs t_max >= 1"));
    }
    let method = FilterMethod::nesterov(alpha, beta, 1.0 / alpha * (1.0 - 1e-15))
        .map_err(|_| Error::domain(format!("invalid nesterov parameters alpha = {alpha}, beta = {beta}")))?;
    validate_grid(sigma_grid, f64::INFINITY)?;
    let sigma_max = *sigma_grid.last().expect("non-empty grid");
    if !(alpha * sigma_max < 1.0) {
        return Err(Error::domain(format!(
            "nesterov auxiliary needs alpha * sigma < 1 over the grid, got {}",
            alpha * sigma_max
        )));
    }
    let theta: Vec<f64> = (0..=t_max).map(|t| beta / (t as f64 + beta)).collect();
    let mut aux = Array2::zeros((t_max + 1, sigma_grid.len()));
    let mut max_abs_aux = 1.0_f64;
    let mut max_margin = f64::NEG_INFINITY;
    for (j, &sigma) in sigma_grid.iter().enumerate() {
        let damp = 1.0 - alpha * sigma;
        let mut scan = ScalarRecursion::new(&method, sigma);
        let mut aux_val = 1.0;
        let mut damp_pow = damp; // (1 - alpha*sigma)^{t+1} at t = 0
        aux[(0, j)] = 1.0;
        for t in 1..=t_max {
            // R_{t} from R_{t-1} and r_{t-1}.
            let th = theta[t - 1];
            aux_val = -(alpha * sigma / th) * (1.0 - th) * scan.r() + damp * aux_val;
            scan.advance()?;
            damp_pow *= damp;
            aux[(t, j)] = aux_val;
            max_abs_aux = max_abs_aux.max(aux_val.abs());
            let bound = theta[t - 1] * theta[t - 1] / alpha * damp_pow;
            let margin = sigma * scan.r() * scan.r() - bound;
            max_margin = max_margin.max(margin);
        }
    }
    Ok(NesterovAuxiliary {
        sigma: sigma_grid.to_vec(),
        aux,
        max_abs_aux,
        max_pointwise_margin: max_margin,
    })
}

/// Numerical inner product of two nu-method residuals against the shifted
/// Jacobi weight `sigma^{2 nu - 1/2} (1 - sigma)^{-1/2}` on `[0, 1]`
/// (kappa_sq = 1). Off-diagonal pairs are near zero: the residuals are an
/// orthogonal family for this weight.
///
/// The integrable endpoint singularity at `sigma = 1` is removed by the
/// substitution `1 - sigma = u^2` on the last slice of the interval; the
/// rest is handled by adaptive Gauss-Legendre panels of the given order.
pub fn jacobi_orthogonality(nu: f64, t: usize, s: usize, quadrature_nodes: usize) -> Result<f64> {
    if t < 1 || s < 1 {
        return Err(Error::domain("jacobi orthogonality needs t, s >= 1"));
    }
    if !(nu > 0.0) {
        return Err(Error::domain(format!("jacobi orthogonality needs nu > 0, got {nu}")));
    }
    if quadrature_nodes < 4 {
        return Err(Error::domain("need at least 4 quadrature nodes"));
    }
    let method = FilterMethod::nu_method(nu, 1.0)?;
    let deep = t.max(s);
    let shallow = t.min(s);
    let residual_pair = move |sigma: f64| -> (f64, f64) {
        let mut scan = ScalarRecursion::new(&method, sigma);
        let mut shallow_val = 1.0;
        for step in 1..=deep {
            scan.advance().expect("nu-method recursion stays finite on [0, 1]");
            if step == shallow {
                shallow_val = scan.r();
            }
        }
        (shallow_val, scan.r())
    };
    let weight_power = 2.0 * nu - 0.5;
    let smooth_part = move |sigma: f64| -> f64 {
        let (a, b) = residual_pair(sigma);
        a * b * sigma.powf(weight_power)
    };

    let delta = 1e-3;
    let tol = 1e-12;
    let main = quad::integrate(
        &|sigma| smooth_part(sigma) / (1.0 - sigma).sqrt(),
        0.0,
        1.0 - delta,
        quadrature_nodes,
        tol,
        40,
    )
    .map_err(|residual| {
        Error::numeric(format!("jacobi quadrature did not converge, achieved residual {residual:e}"))
    })?;
    // 1 - sigma = u^2 turns the (1 - sigma)^{-1/2} factor into 2 du.
    let tail = quad::integrate(
        &|u| 2.0 * smooth_part(1.0 - u * u),
        0.0,
        delta.sqrt(),
        quadrature_nodes,
        tol,
        40,
    )
    .map_err(|residual| {
        Error::numeric(format!("jacobi tail quadrature did not converge, achieved residual {residual:e}"))
    })?;
    Ok(main + tail)
}

/// Log-spaced grid of `points` values on `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) || !(hi > lo) {
        return Err(Error::domain(format!("log grid needs 0 < lo < hi, got [{lo}, {hi}]")));
    }
    if points < 2 {
        return Err(Error::domain("log grid needs at least two points"));
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect();
    grid[0] = lo;
    let last = grid.len() - 1;
    grid[last] = hi;
    Ok(grid)
}

/// The sigma grid used by bound verification: `points` log-spaced values on
/// `[1e-8, kappa_sq]` augmented with the analytic maximizers
/// `sigma = q / (alpha (t + q))` of the gradient descent products
/// `sigma^q r_t(sigma)` for `q` in `{1/2, 1, 2}`, so sup-type checks bracket
/// the true maximum.
pub fn verification_grid(gd_alpha: f64, kappa_sq: f64, t_max: usize, points: usize) -> Result<Vec<f64>> {
    let mut grid = log_grid(1e-8, kappa_sq, points)?;
    for q in [0.5, 1.0, 2.0] {
        for t in 1..=t_max {
            let sigma = q / (gd_alpha * (t as f64 + q));
            if sigma >= 1e-8 && sigma <= kappa_sq {
                grid.push(sigma);
            }
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid nodes"));
    grid.dedup();
    Ok(grid)
}
