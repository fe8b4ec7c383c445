//! Dense vectors and matrices plus the handful of kernels the solver needs.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A finite real vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(j) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "vector entry {j} is not finite ({})",
                entries[j]
            )));
        }
        Ok(Vector(entries))
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Vector::new(v)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Vec<f64> {
        v.0
    }
}

/// Dense row-major matrix with finite entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Accepted JSON encodings: nested rows, or an explicit shape with flat data.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatrixRepr {
    Rows(Vec<Vec<f64>>),
    Flat {
        rows: usize,
        cols: usize,
        data: Vec<f64>,
    },
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        match repr {
            MatrixRepr::Rows(rows) => Matrix::from_rows(&rows),
            MatrixRepr::Flat { rows, cols, data } => Matrix::new(rows, cols, data),
        }
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        MatrixRepr::Flat {
            rows: m.rows,
            cols: m.cols,
            data: m.data,
        }
    }
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        check_dim("matrix data length", rows * cols, data.len())?;
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::invalid(format!(
                "ragged matrix: row {bad} has {} entries, expected {n}",
                rows[bad].len()
            )));
        }
        Matrix::new(m, n, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Matrix::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Matrix::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    /// First `m` rows as a new matrix.
    pub fn top_rows(&self, m: usize) -> Result<Matrix> {
        if m > self.rows {
            return Err(Error::invalid(format!(
                "requested {m} rows from a {}-row matrix",
                self.rows
            )));
        }
        Matrix::new(m, self.cols, self.data[..m * self.cols].to_vec())
    }

    /// `out = A x`
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.cols)) {
            *o = dot(row, x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim("matrix-vector product", self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        self.mul_vec_into(x, &mut out);
        Ok(out)
    }

    /// `out = Aᵀ r`
    pub fn mul_t_vec_into(&self, r: &[f64], out: &mut [f64]) {
        debug_assert_eq!(r.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (&ri, row) in r.iter().zip(self.data.chunks_exact(self.cols)) {
            if ri != 0.0 {
                axpy(ri, row, out);
            }
        }
    }

    pub fn mul_t_vec(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim("transposed matrix-vector product", self.rows, r.len())?;
        let mut out = vec![0.0; self.cols];
        self.mul_t_vec_into(r, &mut out);
        Ok(out)
    }
}

/// Inner product with four independent accumulators; the summation order is
/// fixed, so results are reproducible.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn dist2_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Largest singular value by power iteration on `AᵀA`.
///
/// Starts from the normalized all-ones vector; if that lies in the null space
/// of `A`, restarts from the canonical basis vectors in order. Returns 0 for a
/// zero matrix. The returned value is a Rayleigh-quotient estimate, so it never
/// exceeds the true norm; iteration stops once the relative change falls below
/// `tol`.
pub fn spectral_norm(a: &Matrix, iters: usize, tol: f64) -> Result<f64> {
    if iters == 0 {
        return Err(Error::invalid("spectral_norm needs at least one iteration"));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid(format!("tolerance must be nonnegative, got {tol}")));
    }
    let n = a.cols();
    let mut av = vec![0.0; a.rows()];

    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let starts = std::iter::once(ones).chain((0..n).map(|j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        e
    }));
    for mut v in starts {
        a.mul_vec_into(&v, &mut av);
        let mut sigma = norm2(&av);
        if sigma == 0.0 {
            continue;
        }
        for _ in 0..iters {
            // v <- AᵀA v / ‖AᵀA v‖
            a.mul_t_vec_into(&av, &mut v);
            let nv = norm2(&v);
            if nv == 0.0 {
                break;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            a.mul_vec_into(&v, &mut av);
            let next = norm2(&av);
            let converged = (next - sigma).abs() <= tol * next;
            sigma = sigma.max(next);
            if converged {
                break;
            }
        }
        return Ok(sigma);
    }
    Ok(0.0)
}
