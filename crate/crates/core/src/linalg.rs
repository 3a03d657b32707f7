//! Dense row-major matrices, matrix norms and two independent spectral-norm
//! engines: seeded power iteration and a cyclic-Jacobi dense oracle.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::Lcg64;

/// Default power-iteration tolerance (relative change of the Rayleigh estimate).
pub const DEFAULT_POWER_TOL: f64 = 1e-10;
pub const DEFAULT_POWER_MAX_ITER: usize = 10_000;
/// Largest `min(rows, cols)` accepted by the dense oracle unless overridden.
pub const DEFAULT_ORACLE_CAP: usize = 2048;

const SYMMETRY_TOL: f64 = 1e-12;
const JACOBI_REL_TOL: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense matrix of finite `f64` values with positive dimensions.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape {
                rows,
                cols,
                reason: "dimensions must be positive",
            });
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidShape {
                rows,
                cols,
                reason: "data length differs from rows*cols",
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::InvalidShape {
                rows: rows.len(),
                cols,
                reason: "ragged rows",
            });
        }
        let data = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        let n = values.len();
        let mut data = vec![0.0; n * n];
        for (i, v) in values.iter().enumerate() {
            data[i * n + i] = *v;
        }
        Self::new(n, n, data)
    }

    /// Builds a matrix entry by entry; fails on a non-finite entry.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    /// Crate-internal constructor for buffers that are finite by construction.
    pub(crate) fn from_parts(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert!(rows > 0 && cols > 0 && data.len() == rows * cols);
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Self::from_parts(self.cols, self.rows, out)
    }

    /// Matrix product. Sums run over the inner index in ascending order;
    /// zero entries of `self` are skipped.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = vec![0.0; self.rows * rhs.cols];
        for i in 0..self.rows {
            let acc = &mut out[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in acc.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Self::new(self.rows, rhs.cols, out)
    }

    /// `self * selfᵀ` (rows x rows).
    pub fn gram_rows(&self) -> Self {
        let n = self.rows;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = dot(self.row(i), self.row(j));
                out[i * n + j] = v;
                out[j * n + i] = v;
            }
        }
        Self::from_parts(n, n, out)
    }

    /// `selfᵀ * self` (cols x cols).
    pub fn gram_cols(&self) -> Self {
        self.transpose().gram_rows()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.rows, self.cols, self.data.iter().map(|x| x * t).collect())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Largest absolute entrywise difference; `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Option<f64> {
        if self.shape() != other.shape() {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
        )
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn l2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    l2(m.data())
}

/// Sum over rows of the row ℓ2 norms.
pub fn norm_2_1(m: &DenseMatrix) -> f64 {
    (0..m.rows()).map(|i| l2(m.row(i))).sum()
}

/// Maximum over rows of the row ℓ1 norms (the induced ∞-norm).
pub fn norm_inf_row_l1(m: &DenseMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Largest singular value by power iteration on the smaller Gram matrix.
///
/// The start vector is drawn from [`Lcg64`] seeded with `seed`. Iteration
/// stops once the Rayleigh estimate changes by less than `tol` relative to
/// its current value and the geometric extrapolation of the remaining change
/// is below `tol` as well. Hitting `max_iter` returns the last estimate with
/// `converged = false`.
pub fn spectral_norm_power(m: &DenseMatrix, tol: f64, max_iter: usize, seed: u64) -> SpectralResult {
    assert!(tol > 0.0, "tolerance must be positive");
    let wide = m.rows() < m.cols();
    let n = if wide { m.rows() } else { m.cols() };
    // G = M Mᵀ for wide inputs, Mᵀ M otherwise.
    let apply = |v: &[f64]| -> Vec<f64> {
        if wide {
            let t: Vec<f64> = mat_t_vec(m, v);
            mat_vec(m, &t)
        } else {
            let t = mat_vec(m, v);
            mat_t_vec(m, &t)
        }
    };

    let mut rng = Lcg64::new(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_signed_unit()).collect();
    let mut norm = l2(&v);
    if norm == 0.0 {
        v.iter_mut().for_each(|x| *x = 1.0);
        norm = (n as f64).sqrt();
    }
    v.iter_mut().for_each(|x| *x /= norm);

    let mut prev = f64::NAN;
    let mut prev_delta = f64::NAN;
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let w = apply(&v);
        lambda = dot(&v, &w).max(0.0);
        let wn = l2(&w);
        if wn == 0.0 {
            return SpectralResult {
                value: 0.0,
                iterations: it,
                converged: true,
            };
        }
        let delta = (lambda - prev).abs();
        // The estimate contracts geometrically; the observed ratio q turns the
        // last step into an estimate of the remaining error, delta*q/(1-q).
        let q = (delta / prev_delta).clamp(0.0, 0.999_999);
        let q = if q.is_nan() { 0.0 } else { q };
        let remaining = delta * q / (1.0 - q);
        let stalled = delta <= 8.0 * f64::EPSILON * lambda;
        if stalled || (delta < tol * lambda && remaining < tol * lambda) {
            return SpectralResult {
                value: lambda.sqrt(),
                iterations: it,
                converged: true,
            };
        }
        prev = lambda;
        prev_delta = delta;
        v = w.into_iter().map(|x| x / wn).collect();
    }
    SpectralResult {
        value: lambda.sqrt(),
        iterations: max_iter,
        converged: false,
    }
}

/// [`spectral_norm_power`] with the default tolerance and iteration cap.
pub fn spectral_norm(m: &DenseMatrix, seed: u64) -> SpectralResult {
    spectral_norm_power(m, DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITER, seed)
}

fn mat_vec(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    (0..m.rows()).map(|i| dot(m.row(i), v)).collect()
}

fn mat_t_vec(m: &DenseMatrix, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.cols()];
    for (i, &vi) in v.iter().enumerate() {
        if vi == 0.0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(m.row(i)) {
            *o += vi * x;
        }
    }
    out
}

/// Brute-force spectral norm with the default size cap.
pub fn spectral_norm_dense_oracle(m: &DenseMatrix) -> Result<f64> {
    spectral_norm_dense_oracle_capped(m, DEFAULT_ORACLE_CAP)
}

/// Forms the smaller Gram matrix, diagonalises it with cyclic Jacobi and
/// returns the square root of the largest eigenvalue.
pub fn spectral_norm_dense_oracle_capped(m: &DenseMatrix, cap: usize) -> Result<f64> {
    let size = m.rows().min(m.cols());
    if size > cap {
        return Err(Error::OracleTooLarge { size, cap });
    }
    let gram = if m.rows() <= m.cols() {
        m.gram_rows()
    } else {
        m.gram_cols()
    };
    let eig = jacobi_eigenvalues(gram);
    let top = eig.into_iter().fold(0.0, f64::max);
    Ok(top.sqrt())
}

/// Full spectrum of a symmetric matrix, in descending order.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (m.get(i, j) - m.get(j, i)).abs();
            if gap > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { row: i, col: j, gap });
            }
        }
    }
    let mut eig = jacobi_eigenvalues(m.clone());
    eig.sort_by(|a, b| b.total_cmp(a));
    Ok(eig)
}

/// Cyclic Jacobi on a symmetric matrix (upper triangle is authoritative).
/// Sweeps until the off-diagonal Frobenius norm drops below
/// `1e-14 * ‖A‖_F`. Returns the diagonal, unsorted.
fn jacobi_eigenvalues(m: DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut a = m.into_data();
    for i in 0..n {
        for j in (i + 1)..n {
            a[j * n + i] = a[i * n + j];
        }
    }
    let total = l2(&a);
    let threshold = JACOBI_REL_TOL * total;

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j] * a[i * n + j];
            }
        }
    }
    s.sqrt()
}
