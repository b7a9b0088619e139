//! Synthetic learning problems with controlled spectrum and source.
//!
//! The ambient space is `N` points with the uniform measure, so functions are
//! `N`-vectors under the norm `||f||^2 = (1/N) sum_k f_k^2`. The integral
//! operator is `L = U D U^T` with `D_ii = i^{-gamma}` and `U` an implicit
//! orthogonal operator (a product of Householder reflectors; full `N x N`
//! matrices are never materialized). The target obeys the Holder source
//! condition `f_H = L^r g_0` with `||g_0|| = 1`, and labels are
//! `y = f_H + noise_sigma * xi` with standard Gaussian `xi`.
//!
//! Kernel scale: a matrix cannot simultaneously hold the kernel values and
//! the `i^{-gamma}` eigenvalues of the integral operator: the two differ by
//! a factor `N`, because the integral operator carries the `1/N` measure
//! weight. The convention here keeps the operator spectrum at `i^{-gamma}`
//! exactly and sets the kernel values to `K(z_i, z_j) = N * L_ij`, so the
//! `1/N`-weighted integral operator is exactly `L`.

use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::filters::{FilterMethod, ScalarRecursion};

/// Resource guard on the ambient size.
pub const MAX_PROBLEM_SIZE: usize = 100_000;

/// Number of Householder reflectors composing the implicit orthogonal
/// operator (capped by the dimension).
pub const DEFAULT_REFLECTORS: usize = 200;

/// An implicit orthogonal operator `U = Q_1 Q_2 ... Q_H`, each `Q_i` a
/// Householder reflection `I - 2 v_i v_i^T` with unit `v_i`.
#[derive(Clone, Debug)]
pub struct HouseholderProduct {
    dim: usize,
    reflectors: Vec<Array1<f64>>,
}

impl HouseholderProduct {
    /// Reflectors of the Householder QR factorization of a seeded Gaussian
    /// `dim x count` block, so the images of the first `count` basis vectors
    /// form a Haar-distributed orthonormal frame.
    ///
    /// A product of `count << dim` reflectors built from raw Gaussian
    /// vectors would act as the identity outside a `count`-dimensional
    /// subspace and leave the operator's leading eigenvectors localized on
    /// single sites; the QR construction delocalizes exactly the leading
    /// directions, which is what keeps kernel diagonals (and with them the
    /// spectral bound `kappa_sq = max K(z, z)`) at the trace scale.
    pub fn random(dim: usize, count: usize, rng: &mut ChaCha12Rng) -> Self {
        let count = count.min(dim);
        let mut block = Array2::from_shape_fn((dim, count), |_| rng.sample::<f64, _>(StandardNormal));
        let mut reflectors = Vec::with_capacity(count);
        for h in 0..count {
            // Reflector zeroing column h below the diagonal; supported on
            // coordinates h..dim.
            let mut v = Array1::zeros(dim);
            let col = block.column(h);
            let norm_sq: f64 = col.iter().skip(h).map(|x| x * x).sum();
            let norm = norm_sq.sqrt();
            if norm == 0.0 {
                reflectors.push(v);
                continue;
            }
            let head = block[(h, h)];
            for i in h..dim {
                v[i] = block[(i, h)];
            }
            v[h] += head.signum() * norm;
            let v_norm = v.dot(&v).sqrt();
            if v_norm > 0.0 {
                v /= v_norm;
            }
            for j in (h + 1)..count {
                let mut col = block.column_mut(j);
                let coeff = 2.0 * v.iter().zip(col.iter()).map(|(a, b)| a * b).sum::<f64>();
                for (ci, vi) in col.iter_mut().zip(&v) {
                    *ci -= coeff * vi;
                }
            }
            reflectors.push(v);
        }
        Self { dim, reflectors }
    }

    /// The identity operator (no reflectors).
    pub fn identity(dim: usize) -> Self {
        Self { dim, reflectors: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn reflect(v: &Array1<f64>, x: &mut Array1<f64>) {
        let coeff = 2.0 * v.dot(x);
        x.zip_mut_with(v, |xi, vi| *xi -= coeff * vi);
    }

    /// `x <- U x`.
    pub fn apply(&self, x: &mut Array1<f64>) {
        for v in self.reflectors.iter().rev() {
            Self::reflect(v, x);
        }
    }

    /// `x <- U^T x`.
    pub fn apply_transpose(&self, x: &mut Array1<f64>) {
        for v in &self.reflectors {
            Self::reflect(v, x);
        }
    }

    fn reflect_mat(v: &Array1<f64>, m: &mut Array2<f64>) {
        let cols = m.ncols();
        let mut w = vec![0.0; cols];
        for (vi, row) in v.iter().zip(m.rows()) {
            if *vi != 0.0 {
                for (wj, mj) in w.iter_mut().zip(row) {
                    *wj += vi * mj;
                }
            }
        }
        for (vi, mut row) in v.iter().zip(m.rows_mut()) {
            let c = 2.0 * vi;
            if c != 0.0 {
                for (mj, wj) in row.iter_mut().zip(&w) {
                    *mj -= c * wj;
                }
            }
        }
    }

    /// `M <- U M` (columns transformed independently).
    pub fn apply_mat(&self, m: &mut Array2<f64>) {
        for v in self.reflectors.iter().rev() {
            Self::reflect_mat(v, m);
        }
    }

    /// `M <- U^T M`.
    pub fn apply_transpose_mat(&self, m: &mut Array2<f64>) {
        for v in &self.reflectors {
            Self::reflect_mat(v, m);
        }
    }
}

/// How the source vector `g_0` is built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceKind {
    /// I.i.d. standard Gaussian entries, normalized to `||g_0|| = 1`.
    GaussianUnitNorm,
    /// `g_0 = sqrt(N) U e_i` for the given 1-based eigen index: the source
    /// sits on a single eigendirection of the operator.
    Spike(usize),
}

/// Optional knobs for [`generate_problem_with`].
#[derive(Clone, Copy, Debug)]
pub struct ProblemOptions {
    pub source: SourceKind,
    /// Number of Householder reflectors; `None` means
    /// `min(N, DEFAULT_REFLECTORS)`, `Some(0)` makes `U` the identity.
    pub reflector_count: Option<usize>,
    /// When set, rescale the source so the target has this norm,
    /// `||f_H|| = target_norm`. With `None` the source itself is normalized,
    /// `||g_0|| = 1`; for a generic Gaussian source and decaying spectrum
    /// that leaves `||f_H||` around `sqrt(sum_i d_i^{2r} / N)`, far below the
    /// Figure-style noise levels, so experiments that need a visible
    /// bias-variance tradeoff pin the target scale instead.
    pub target_norm: Option<f64>,
}

impl Default for ProblemOptions {
    fn default() -> Self {
        Self { source: SourceKind::GaussianUnitNorm, reflector_count: None, target_norm: None }
    }
}

/// A generated problem: spectrum, source, target and noisy labels.
#[derive(Clone, Debug)]
pub struct SyntheticProblem {
    size: usize,
    gamma: f64,
    source_exponent: f64,
    noise_sigma: f64,
    operator: HouseholderProduct,
    eigenvalues: Array1<f64>,
    g0: Array1<f64>,
    /// `U^T g_0`, the source expressed in the eigenbasis.
    source_eigen: Array1<f64>,
    target: Array1<f64>,
    labels: Array1<f64>,
    /// `sup_z K(z, z) = N * max_k L_kk`, the population spectral bound.
    kappa_sq: f64,
}

/// Build the problem `L = U D U^T`, `f_H = L^r g_0`, `y = f_H + noise`.
/// Deterministic in `seed`.
pub fn generate_problem(
    size: usize,
    gamma: f64,
    source_exponent: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<SyntheticProblem> {
    generate_problem_with(size, gamma, source_exponent, noise_sigma, seed, &ProblemOptions::default())
}

/// [`generate_problem`] with explicit source and operator options.
pub fn generate_problem_with(
    size: usize,
    gamma: f64,
    source_exponent: f64,
    noise_sigma: f64,
    seed: u64,
    options: &ProblemOptions,
) -> Result<SyntheticProblem> {
    if size < 2 {
        return Err(Error::domain(format!("problem size must be at least 2, got {size}")));
    }
    if size > MAX_PROBLEM_SIZE {
        return Err(Error::domain(format!("problem size {size} exceeds the guard {MAX_PROBLEM_SIZE}")));
    }
    if !(gamma >= 1.0) {
        return Err(Error::domain(format!("spectrum decay gamma must be >= 1, got {gamma}")));
    }
    if !(source_exponent >= 0.0) {
        return Err(Error::domain(format!("source exponent r must be >= 0, got {source_exponent}")));
    }
    if !(noise_sigma >= 0.0) {
        return Err(Error::domain(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let reflectors = options.reflector_count.unwrap_or_else(|| size.min(DEFAULT_REFLECTORS));
    let operator = if reflectors == 0 {
        HouseholderProduct::identity(size)
    } else {
        HouseholderProduct::random(size, reflectors, &mut rng)
    };
    let eigenvalues = Array1::from_iter((1..=size).map(|i| (i as f64).powf(-gamma)));

    let (g0, source_eigen) = match options.source {
        SourceKind::GaussianUnitNorm => {
            let mut g0 =
                Array1::from_iter((0..size).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let norm_sq = g0.dot(&g0) / size as f64;
            g0 *= (1.0 / norm_sq).sqrt();
            let mut source_eigen = g0.clone();
            operator.apply_transpose(&mut source_eigen);
            (g0, source_eigen)
        }
        SourceKind::Spike(index) => {
            if index < 1 || index > size {
                return Err(Error::domain(format!(
                    "spike index must be in 1..={size}, got {index}"
                )));
            }
            let mut source_eigen = Array1::zeros(size);
            source_eigen[index - 1] = (size as f64).sqrt();
            let mut g0 = source_eigen.clone();
            operator.apply(&mut g0);
            (g0, source_eigen)
        }
    };

    // f_H = U D^r (U^T g_0); r = 0 keeps g_0 exactly (L^0 is the identity).
    let mut target = if source_exponent == 0.0 {
        g0.clone()
    } else {
        let mut scaled = &source_eigen
            * &Array1::from_iter(eigenvalues.iter().map(|d| d.powf(source_exponent)));
        operator.apply(&mut scaled);
        scaled
    };
    let mut g0 = g0;
    let mut source_eigen = source_eigen;
    if let Some(norm) = options.target_norm {
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::domain(format!("target norm must be positive, got {norm}")));
        }
        let current = (target.dot(&target) / size as f64).sqrt();
        if current == 0.0 {
            return Err(Error::domain("cannot rescale a zero target"));
        }
        let scale = norm / current;
        target *= scale;
        g0 *= scale;
        source_eigen *= scale;
    }

    let labels = if noise_sigma == 0.0 {
        target.clone()
    } else {
        let noise = Array1::from_iter(
            (0..size).map(|_| noise_sigma * rng.sample::<f64, _>(StandardNormal)),
        );
        &target + &noise
    };

    let kappa_sq = size as f64 * max_operator_diagonal(&operator, &eigenvalues);

    Ok(SyntheticProblem {
        size,
        gamma,
        source_exponent,
        noise_sigma,
        operator,
        eigenvalues,
        g0,
        source_eigen,
        target,
        labels,
        kappa_sq,
    })
}

/// `max_k (U D U^T)_{kk}`, computed exactly in column blocks of the implicit
/// operator (never materializing the full matrix).
fn max_operator_diagonal(operator: &HouseholderProduct, eigenvalues: &Array1<f64>) -> f64 {
    use rayon::prelude::*;
    let size = operator.dim();
    let block = 256;
    let starts: Vec<usize> = (0..size).step_by(block).collect();
    starts
        .par_iter()
        .map(|&start| {
            let cols = block.min(size - start);
            let mut w = Array2::zeros((size, cols));
            for j in 0..cols {
                w[(start + j, j)] = 1.0;
            }
            operator.apply_transpose_mat(&mut w);
            let mut best = f64::NEG_INFINITY;
            for j in 0..cols {
                let mut acc = 0.0;
                for (v, d) in w.column(j).iter().zip(eigenvalues) {
                    acc += v * v * d;
                }
                best = best.max(acc);
            }
            best
        })
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

impl SyntheticProblem {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn source_exponent(&self) -> f64 {
        self.source_exponent
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// Operator eigenvalues `i^{-gamma}`, descending.
    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.eigenvalues
    }

    pub fn source(&self) -> &Array1<f64> {
        &self.g0
    }

    /// The source in eigen coordinates, `U^T g_0`.
    pub fn source_eigen(&self) -> &Array1<f64> {
        &self.source_eigen
    }

    /// The target `f_H = L^r g_0`.
    pub fn target(&self) -> &Array1<f64> {
        &self.target
    }

    /// Noisy labels on all `N` points.
    pub fn labels(&self) -> &Array1<f64> {
        &self.labels
    }

    pub fn orthogonal_factor(&self) -> &HouseholderProduct {
        &self.operator
    }

    /// The population spectral bound `sup_z K(z, z) = N * max_k L_kk`. Every
    /// sampled Gram diagonal is bounded by it, so step sizes derived from it
    /// are admissible for every repetition and do not drift with the sample
    /// size.
    pub fn kappa_sq(&self) -> f64 {
        self.kappa_sq
    }

    /// One kernel value `K(z_i, z_j) = N * L_ij` (0-based indices).
    /// Costs two implicit operator applications; meant for tests and spot
    /// checks, not bulk assembly.
    pub fn kernel_entry(&self, i: usize, j: usize) -> f64 {
        let mut wi = Array1::zeros(self.size);
        wi[i] = 1.0;
        self.operator.apply_transpose(&mut wi);
        let mut wj = Array1::zeros(self.size);
        wj[j] = 1.0;
        self.operator.apply_transpose(&mut wj);
        let mut acc = 0.0;
        for ((a, b), d) in wi.iter().zip(&wj).zip(&self.eigenvalues) {
            acc += a * b * d;
        }
        self.size as f64 * acc
    }

    /// Kernel values between all `N` points (rows) and the sampled points
    /// (columns): `C = N * (U D U^T)[:, indices]`.
    pub fn cross_kernel(&self, indices: &[usize]) -> Result<Array2<f64>> {
        let w = self.eigen_columns(indices)?;
        let mut scaled = w;
        for (mut row, d) in scaled.rows_mut().into_iter().zip(&self.eigenvalues) {
            row *= *d;
        }
        self.operator.apply_mat(&mut scaled);
        scaled *= self.size as f64;
        Ok(scaled)
    }

    /// Columns `U^T e_{i_j}` for the given sample indices.
    fn eigen_columns(&self, indices: &[usize]) -> Result<Array2<f64>> {
        for &i in indices {
            if i >= self.size {
                return Err(Error::domain(format!("sample index {i} out of range for size {}", self.size)));
            }
        }
        let mut w = Array2::zeros((self.size, indices.len()));
        for (j, &i) in indices.iter().enumerate() {
            w[(i, j)] = 1.0;
        }
        self.operator.apply_transpose_mat(&mut w);
        Ok(w)
    }

    /// Excess risk `(1/N) sum_k (f_hat_k - f_H_k)^2` of a predictor on all
    /// `N` points.
    pub fn excess_risk(&self, f_hat: &Array1<f64>) -> Result<f64> {
        if f_hat.len() != self.size {
            return Err(Error::domain(format!(
                "predictor length {} does not match problem size {}",
                f_hat.len(),
                self.size
            )));
        }
        let mut acc = 0.0;
        for (a, b) in f_hat.iter().zip(&self.target) {
            let d = a - b;
            acc += d * d;
        }
        Ok(acc / self.size as f64)
    }

    /// Error in the weighted norm `(1/N) sum_i d_i^{-2a} (U^T (f_hat - f_H))_i^2`
    /// for `a` in `[0, 1/2]`; `a = 0` recovers the excess risk.
    pub fn weighted_error(&self, f_hat: &Array1<f64>, a: f64) -> Result<f64> {
        if f_hat.len() != self.size {
            return Err(Error::domain(format!(
                "predictor length {} does not match problem size {}",
                f_hat.len(),
                self.size
            )));
        }
        if !(0.0..=0.5).contains(&a) {
            return Err(Error::domain(format!("weighted error needs a in [0, 1/2], got {a}")));
        }
        let mut diff = f_hat - &self.target;
        self.operator.apply_transpose(&mut diff);
        let mut acc = 0.0;
        for (v, d) in diff.iter().zip(&self.eigenvalues) {
            acc += d.powf(-2.0 * a) * v * v;
        }
        Ok(acc / self.size as f64)
    }

    /// Exact infinite-sample squared bias `||r_t(L) f_H||^2` for
    /// `t = 0..=t_max`, computed in the eigenbasis:
    /// `b(t) = (1/N) sum_i r_t(d_i)^2 (d_i^r (U^T g_0)_i)^2`.
    pub fn population_bias(&self, method: &FilterMethod, t_max: usize) -> Result<Vec<f64>> {
        let kappa_sq = method.kappa_sq();
        if self.eigenvalues[0] > kappa_sq * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "method declares kappa_sq = {kappa_sq} below the spectrum top {}",
                self.eigenvalues[0]
            )));
        }
        let r = self.source_exponent;
        let mut bias = vec![0.0; t_max + 1];
        for (d, s) in self.eigenvalues.iter().zip(&self.source_eigen) {
            let coeff = d.powf(r) * s;
            let weight = coeff * coeff / self.size as f64;
            if weight == 0.0 {
                continue;
            }
            let mut scan = ScalarRecursion::new(method, *d);
            bias[0] += weight;
            for b in bias.iter_mut().skip(1) {
                scan.advance()?;
                *b += weight * scan.r() * scan.r();
            }
        }
        Ok(bias)
    }
}

/// Index sampling mode. The statistical model draws with replacement;
/// without-replacement exists for the `n = N` diagnostic, where the sampled
/// Gram is a permutation similarity of the full operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleMode {
    WithReplacement,
    WithoutReplacement,
}

/// A drawn sample: indices, the empirical Gram `K_hat`, labels at the drawn
/// points, and the normalized operator `M = K_hat / n` the solvers run on.
#[derive(Clone, Debug)]
pub struct Sample {
    pub indices: Vec<usize>,
    pub gram: Array2<f64>,
    pub labels: Array1<f64>,
    pub operator: Array2<f64>,
    /// `max_j K_hat[j, j]`, the per-sample spectral bound estimate.
    pub kappa_sq: f64,
}

/// Draw `n` indices i.i.d. uniform with replacement and assemble the sample.
/// Deterministic in `seed`.
pub fn draw_sample(problem: &SyntheticProblem, n: usize, seed: u64) -> Result<Sample> {
    draw_sample_with_mode(problem, n, seed, SampleMode::WithReplacement)
}

pub fn draw_sample_with_mode(
    problem: &SyntheticProblem,
    n: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<Sample> {
    Ok(sample_impl(problem, n, seed, mode, false)?.0)
}

/// Like [`draw_sample_with_mode`], additionally returning the `N x n`
/// cross-kernel between all points and the sampled points (sharing the
/// implicit-operator work with the Gram assembly).
pub fn draw_sample_with_cross_kernel(
    problem: &SyntheticProblem,
    n: usize,
    seed: u64,
    mode: SampleMode,
) -> Result<(Sample, Array2<f64>)> {
    let (sample, cross) = sample_impl(problem, n, seed, mode, true)?;
    Ok((sample, cross.expect("requested cross kernel")))
}

fn sample_impl(
    problem: &SyntheticProblem,
    n: usize,
    seed: u64,
    mode: SampleMode,
    with_cross: bool,
) -> Result<(Sample, Option<Array2<f64>>)> {
    let size = problem.size;
    if n < 1 || n > size {
        return Err(Error::domain(format!("sample size must be in 1..={size}, got {n}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let indices: Vec<usize> = match mode {
        SampleMode::WithReplacement => (0..n).map(|_| rng.random_range(0..size)).collect(),
        SampleMode::WithoutReplacement => {
            let mut all: Vec<usize> = (0..size).collect();
            all.shuffle(&mut rng);
            all.truncate(n);
            all
        }
    };

    let w = problem.eigen_columns(&indices)?;
    // K_hat = N (D^{1/2} W)^T (D^{1/2} W).
    let mut half = w.clone();
    for (mut row, d) in half.rows_mut().into_iter().zip(&problem.eigenvalues) {
        row *= d.sqrt();
    }
    let mut gram = half.t().dot(&half);
    gram *= size as f64;
    for j in 0..n {
        for k in (j + 1)..n {
            let avg = 0.5 * (gram[(j, k)] + gram[(k, j)]);
            gram[(j, k)] = avg;
            gram[(k, j)] = avg;
        }
    }
    let kappa_sq = (0..n).map(|j| gram[(j, j)]).fold(f64::NEG_INFINITY, f64::max);
    let labels = Array1::from_iter(indices.iter().map(|&i| problem.labels[i]));
    let operator = &gram / n as f64;

    let cross = if with_cross {
        let mut scaled = w;
        for (mut row, d) in scaled.rows_mut().into_iter().zip(&problem.eigenvalues) {
            row *= *d;
        }
        problem.operator.apply_mat(&mut scaled);
        scaled *= size as f64;
        Some(scaled)
    } else {
        None
    };

    Ok((Sample { indices, gram, labels, operator, kappa_sq }, cross))
}
