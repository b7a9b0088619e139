//! Kernel functions and Gram-matrix assembly.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// A positive definite kernel on feature vectors.
///
/// Conventions: the Gaussian kernel is `exp(-||x - x'||^2 / (2 width^2))`,
/// so `K(x, x) = 1`; the polynomial kernel is `(<x, x'> + offset)^degree`
/// with a non-negative offset (`offset = 0` is the homogeneous case).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Kernel {
    Linear,
    Gaussian { width: f64 },
    Polynomial { degree: u32, offset: f64 },
}

impl Kernel {
    pub fn gaussian(width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::domain(format!("gaussian kernel needs width > 0, got {width}")));
        }
        Ok(Kernel::Gaussian { width })
    }

    pub fn polynomial(degree: u32, offset: f64) -> Result<Self> {
        if degree < 1 {
            return Err(Error::domain("polynomial kernel needs degree >= 1"));
        }
        if !(offset >= 0.0) || !offset.is_finite() {
            return Err(Error::domain(format!("polynomial kernel needs offset >= 0, got {offset}")));
        }
        Ok(Kernel::Polynomial { degree, offset })
    }

    /// Evaluate the kernel on two equal-length feature vectors.
    pub fn eval(&self, x: ArrayView1<'_, f64>, y: ArrayView1<'_, f64>) -> f64 {
        match *self {
            Kernel::Linear => x.dot(&y),
            Kernel::Gaussian { width } => {
                let mut sq = 0.0;
                for (a, b) in x.iter().zip(y.iter()) {
                    let d = a - b;
                    sq += d * d;
                }
                (-sq / (2.0 * width * width)).exp()
            }
            Kernel::Polynomial { degree, offset } => (x.dot(&y) + offset).powi(degree as i32),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Gaussian { .. } => "gaussian",
            Kernel::Polynomial { .. } => "polynomial",
        }
    }
}

fn check_points(points: &ArrayView2<'_, f64>, role: &str) -> Result<()> {
    if points.nrows() == 0 {
        return Err(Error::domain(format!("{role} point set must not be empty")));
    }
    for (i, row) in points.rows().into_iter().enumerate() {
        for &v in row.iter() {
            if !v.is_finite() {
                return Err(Error::data(format!("non-finite feature in {role} row {i}")));
            }
        }
    }
    Ok(())
}

/// Gram matrix `K[j, k] = K(x_j, x_k)` of a point set (rows are points),
/// together with the spectral bound estimate `kappa_sq = max_j K(x_j, x_j)`.
pub fn gram(points: &ArrayView2<'_, f64>, kernel: &Kernel) -> Result<(Array2<f64>, f64)> {
    check_points(points, "gram")?;
    let n = points.nrows();
    let mut matrix = Array2::zeros((n, n));
    for j in 0..n {
        for k in j..n {
            let value = kernel.eval(points.row(j), points.row(k));
            if !value.is_finite() {
                return Err(Error::data(format!("non-finite kernel value at pair ({j}, {k})")));
            }
            matrix[(j, k)] = value;
            matrix[(k, j)] = value;
        }
    }
    let kappa_sq = (0..n).map(|j| matrix[(j, j)]).fold(f64::NEG_INFINITY, f64::max);
    Ok((matrix, kappa_sq))
}

/// Rectangular kernel matrix `K[i, j] = K(a_i, b_j)` between two point sets
/// of equal feature dimension.
pub fn cross_gram(
    rows: &ArrayView2<'_, f64>,
    cols: &ArrayView2<'_, f64>,
    kernel: &Kernel,
) -> Result<Array2<f64>> {
    check_points(rows, "cross-gram row")?;
    check_points(cols, "cross-gram column")?;
    if rows.ncols() != cols.ncols() {
        return Err(Error::domain(format!(
            "feature dimensions differ: {} vs {}",
            rows.ncols(),
            cols.ncols()
        )));
    }
    let mut matrix = Array2::zeros((rows.nrows(), cols.nrows()));
    for i in 0..rows.nrows() {
        for j in 0..cols.nrows() {
            let value = kernel.eval(rows.row(i), cols.row(j));
            if !value.is_finite() {
                return Err(Error::data(format!("non-finite kernel value at pair ({i}, {j})")));
            }
            matrix[(i, j)] = value;
        }
    }
    Ok(matrix)
}

/// Standardize feature columns to zero mean and unit variance in place.
/// Columns with (numerically) zero spread are set to zero instead of being
/// divided by their vanishing standard deviation.
pub fn standardize(features: &mut Array2<f64>) {
    let rows = features.nrows();
    if rows == 0 {
        return;
    }
    for mut col in features.columns_mut() {
        let mean = col.sum() / rows as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / rows as f64;
        let std = var.sqrt();
        if std < 1e-12 {
            col.fill(0.0);
        } else {
            col.mapv_inplace(|v| (v - mean) / std);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::sym_eig;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn gaussian_diagonal_is_one() {
        let points = array![[0.0, 1.0], [2.0, -1.0], [0.5, 0.5]];
        let (k, kappa_sq) = gram(&points.view(), &Kernel::gaussian(1.2).unwrap()).unwrap();
        for j in 0..3 {
            assert_eq!(k[(j, j)], 1.0);
        }
        assert_eq!(kappa_sq, 1.0);
        for v in k.iter() {
            assert!(*v > 0.0 && *v <= 1.0);
        }
    }

    #[test]
    fn polynomial_at_origin() {
        let points = array![[0.0, 0.0]];
        let kernel = Kernel::polynomial(9, 1.0).unwrap();
        let (k, _) = gram(&points.view(), &kernel).unwrap();
        assert_eq!(k[(0, 0)], 1.0);
    }

    #[test]
    fn linear_on_orthonormal_basis() {
        let points = array![[1.0, 0.0], [0.0, 1.0]];
        let (k, kappa_sq) = gram(&points.view(), &Kernel::Linear).unwrap();
        assert_eq!(k, array![[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(kappa_sq, 1.0);
    }

    #[test]
    fn kernels_are_symmetric_and_grams_psd() {
        let mut rng = ChaCha12Rng::seed_from_u64(21);
        let mut points = Array2::zeros((30, 4));
        for v in points.iter_mut() {
            *v = rng.random_range(-2.0..2.0);
        }
        for kernel in [
            Kernel::Linear,
            Kernel::gaussian(0.8).unwrap(),
            Kernel::polynomial(3, 1.0).unwrap(),
        ] {
            let x = points.row(3);
            let y = points.row(17);
            assert_eq!(kernel.eval(x, y), kernel.eval(y, x));
            let (k, kappa_sq) = gram(&points.view(), &kernel).unwrap();
            let min_eig = *sym_eig(&k).unwrap().eigenvalues().last().unwrap();
            assert!(min_eig >= -1e-8 * kappa_sq, "{}: min eig {min_eig}", kernel.label());
        }
    }

    #[test]
    fn cross_gram_shape_and_errors() {
        let a = array![[0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let b = array![[0.5, 0.5], [2.0, 2.0]];
        let k = cross_gram(&a.view(), &b.view(), &Kernel::Linear).unwrap();
        assert_eq!(k.dim(), (3, 2));
        assert_eq!(k[(2, 1)], 4.0);
        let bad = array![[1.0, 2.0, 3.0]];
        assert!(cross_gram(&a.view(), &bad.view(), &Kernel::Linear).is_err());
        let nan = array![[f64::NAN, 0.0]];
        assert!(gram(&nan.view(), &Kernel::Linear).is_err());
    }

    #[test]
    fn standardize_centers_and_scales() {
        let mut features = array![[1.0, 5.0], [3.0, 5.0], [5.0, 5.0]];
        standardize(&mut features);
        for col in 0..2 {
            let mean: f64 = features.column(col).sum() / 3.0;
            assert!(mean.abs() < 1e-12);
        }
        // Constant column is zeroed rather than divided by zero.
        assert!(features.column(1).iter().all(|v| *v == 0.0));
        let var: f64 = features.column(0).iter().map(|v| v * v).sum::<f64>() / 3.0;
        assert!((var - 1.0).abs() < 1e-12);
    }
}
