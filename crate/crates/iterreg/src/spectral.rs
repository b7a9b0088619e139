//! Symmetric eigendecomposition and matrix functions.
//!
//! The eigensolver is a plain cyclic Jacobi sweep (see Numerical Recipes,
//! 11.1). It is slow past a few thousand rows but backward stable and has no
//! external dependencies, and every matrix this crate decomposes is small:
//! the decomposition only serves as the exact oracle `g_t(M) y` against which
//! the iterative solvers are checked, and as the engine behind fractional
//! operator powers in the synthetic generator.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::filters::{filter_values, FilterMethod};

/// Maximum dimension accepted by [`sym_eig`].
pub const MAX_EIG_DIM: usize = 10_000;

const SWEEP_CAP: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Eigenvalues (descending) and matching orthonormal eigenvectors of a
/// symmetric matrix.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    eigenvalues: Array1<f64>,
    eigenvectors: Array2<f64>,
}

impl EigenDecomposition {
    /// Eigenvalues sorted in descending order.
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    /// Orthonormal eigenvector columns, ordered like the eigenvalues.
    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues clipped at zero for positive semidefinite consumers,
    /// together with the pre-clip minimum so callers can report how negative
    /// the raw spectrum was.
    pub fn nonnegative_eigenvalues(&self) -> (Vec<f64>, f64) {
        let pre_clip_min = self.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        let clipped = self.eigenvalues.iter().map(|&v| v.max(0.0)).collect();
        (clipped, pre_clip_min)
    }

    fn rotate_to_eigenbasis(&self, v: &Array1<f64>) -> Array1<f64> {
        self.eigenvectors.t().dot(v)
    }

    fn rotate_from_eigenbasis(&self, w: &Array1<f64>) -> Array1<f64> {
        self.eigenvectors.dot(w)
    }
}

fn check_square_symmetric(a: &Array2<f64>) -> Result<(usize, f64)> {
    let (rows, cols) = a.dim();
    if rows != cols {
        return Err(Error::domain(format!("matrix must be square, got {rows} x {cols}")));
    }
    if rows == 0 {
        return Err(Error::domain("matrix must not be empty"));
    }
    if rows > MAX_EIG_DIM {
        return Err(Error::domain(format!("dimension {rows} exceeds the eigensolver cap {MAX_EIG_DIM}")));
    }
    let mut scale = 0.0_f64;
    for &v in a.iter() {
        if !v.is_finite() {
            return Err(Error::domain("matrix contains non-finite entries"));
        }
        scale = scale.max(v.abs());
    }
    for i in 0..rows {
        for j in (i + 1)..rows {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::domain(format!(
                    "matrix is not symmetric: |a[{i},{j}] - a[{j},{i}]| = {:e}",
                    (a[(i, j)] - a[(j, i)]).abs()
                )));
            }
        }
    }
    Ok((rows, scale))
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)] * a[(i, j)];
            }
        }
    }
    acc.sqrt()
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates sweeps of plane rotations until the off-diagonal Frobenius norm
/// drops below `1e-12` relative to the matrix norm, with a cap of 100 sweeps.
pub fn sym_eig(a: &Array2<f64>) -> Result<EigenDecomposition> {
    let (n, _) = check_square_symmetric(a)?;
    let mut work = a.clone();
    // Exact symmetry keeps the rotations consistent.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (work[(i, j)] + work[(j, i)]);
            work[(i, j)] = avg;
            work[(j, i)] = avg;
        }
    }
    let mut vectors = Array2::eye(n);
    let frob = work.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = OFF_DIAGONAL_TOL * frob.max(f64::MIN_POSITIVE);

    let mut converged = n == 1;
    for _sweep in 0..SWEEP_CAP {
        if off_diagonal_norm(&work) <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = work[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (work[(q, q)] - work[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Columns p and q of A and of the accumulated rotations.
                for k in 0..n {
                    let akp = work[(k, p)];
                    let akq = work[(k, q)];
                    work[(k, p)] = c * akp - s * akq;
                    work[(k, q)] = s * akp + c * akq;
                    let vkp = vectors[(k, p)];
                    let vkq = vectors[(k, q)];
                    vectors[(k, p)] = c * vkp - s * vkq;
                    vectors[(k, q)] = s * vkp + c * vkq;
                }
                // Rows p and q of A.
                for k in 0..n {
                    let apk = work[(p, k)];
                    let aqk = work[(q, k)];
                    work[(p, k)] = c * apk - s * aqk;
                    work[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    if !converged && off_diagonal_norm(&work) > target {
        return Err(Error::numeric(format!(
            "jacobi eigensolver did not converge in {SWEEP_CAP} sweeps (off-diagonal {:e}, target {:e})",
            off_diagonal_norm(&work),
            target
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| work[(j, j)].partial_cmp(&work[(i, i)]).expect("finite eigenvalues"));
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| work[(i, i)]));
    let mut sorted_vectors = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            sorted_vectors[(k, new_col)] = vectors[(k, old_col)];
        }
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors: sorted_vectors })
}

/// Apply the filter `g_t` of `method` to `v` through the eigendecomposition:
/// `U diag(g_t(lambda_i)) U^T v`. Small negative eigenvalues (roundoff from
/// positive semidefinite inputs) are clipped at zero; an eigenvalue above the
/// declared `kappa_sq` is a domain error, since the step-size conditions are
/// relative to that bound.
pub fn apply_filter(
    method: &FilterMethod,
    t: usize,
    eig: &EigenDecomposition,
    v: &Array1<f64>,
) -> Result<Array1<f64>> {
    if v.len() != eig.dim() {
        return Err(Error::domain(format!(
            "vector length {} does not match decomposition dimension {}",
            v.len(),
            eig.dim()
        )));
    }
    let kappa_sq = method.kappa_sq();
    let scale = eig.eigenvalues.iter().cloned().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut sigmas = Vec::with_capacity(eig.dim());
    for &lambda in eig.eigenvalues.iter() {
        if lambda > kappa_sq * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "eigenvalue {lambda} exceeds the declared kappa_sq = {kappa_sq}; re-estimate kappa_sq from the operator"
            )));
        }
        if lambda < -1e-8 * scale.max(1.0) {
            return Err(Error::domain(format!(
                "eigenvalue {lambda} is too negative for a positive semidefinite operator"
            )));
        }
        sigmas.push(lambda.max(0.0).min(kappa_sq));
    }
    let (g, _r) = filter_values(method, &sigmas, t)?;
    let mut w = eig.rotate_to_eigenbasis(v);
    for (wi, gi) in w.iter_mut().zip(&g) {
        *wi *= gi;
    }
    Ok(eig.rotate_from_eigenbasis(&w))
}

/// Apply the fractional operator power `A^r` to `v` through the
/// eigendecomposition, with the conventions `0^0 = 1` and `0^r = 0` for
/// `r > 0`. Eigenvalues in `[-1e-12, 0)` are clipped to zero; a negative
/// power combined with a zero eigenvalue is a domain error.
pub fn matrix_power_apply(eig: &EigenDecomposition, r: f64, v: &Array1<f64>) -> Result<Array1<f64>> {
    if v.len() != eig.dim() {
        return Err(Error::domain(format!(
            "vector length {} does not match decomposition dimension {}",
            v.len(),
            eig.dim()
        )));
    }
    if !r.is_finite() {
        return Err(Error::domain(format!("power must be finite, got {r}")));
    }
    let mut powers = Vec::with_capacity(eig.dim());
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -1e-12 {
            return Err(Error::domain(format!(
                "eigenvalue {lambda} below the clipping threshold -1e-12; operator is not positive semidefinite"
            )));
        }
        let clipped = lambda.max(0.0);
        let value = if clipped == 0.0 {
            if r == 0.0 {
                1.0
            } else if r > 0.0 {
                0.0
            } else {
                return Err(Error::domain("negative power of an operator with a zero eigenvalue"));
            }
        } else {
            clipped.powf(r)
        };
        powers.push(value);
    }
    let mut w = eig.rotate_to_eigenbasis(v);
    for (wi, pi) in w.iter_mut().zip(&powers) {
        *wi *= pi;
    }
    Ok(eig.rotate_from_eigenbasis(&w))
}

/// Effective dimension `N(lambda) = sum_i sigma_i / (sigma_i + lambda)` of a
/// non-negative spectrum. Non-increasing in `lambda` and bounded by the
/// number of non-zero eigenvalues.
pub fn effective_dimension(eigenvalues: &[f64], lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("effective dimension needs lambda > 0, got {lambda}")));
    }
    let mut acc = 0.0;
    for (i, &sigma) in eigenvalues.iter().enumerate() {
        if sigma < -1e-12 {
            return Err(Error::domain(format!("eigenvalue {sigma} at index {i} is negative")));
        }
        let s = sigma.max(0.0);
        acc += s / (s + lambda);
    }
    Ok(acc)
}
