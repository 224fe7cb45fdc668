//! Dense real matrix in row-major order. Every module trades in this type.

use crate::error::{Error, Result};

/// Dense `rows x cols` matrix of finite `f64` values, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    /// Build a matrix from row-major data. Rejects empty dimensions and
    /// length mismatches; finiteness is the caller's responsibility for
    /// trusted numeric pipelines and is checked explicitly by the readers.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
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

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidShape {
                rows: r,
                cols: c,
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        Self::new(r, c, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable access to two distinct rows at once.
    pub fn two_rows_mut(&mut self, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
        assert!(i < j && j < self.rows);
        let (head, tail) = self.data.split_at_mut(j * self.cols);
        (
            &mut head[i * self.cols..(i + 1) * self.cols],
            &mut tail[..self.cols],
        )
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                expected_rows: self.cols,
                expected_cols: other.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        gemm(
            self.rows,
            self.cols,
            other.cols,
            1.0,
            &self.data,
            self.cols as isize,
            1,
            &other.data,
            other.cols as isize,
            1,
            &mut out.data,
        );
        Ok(out)
    }

    /// `self^T * other`.
    pub fn matmul_transa(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul_transa",
                expected_rows: self.rows,
                expected_cols: other.cols,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.cols, other.cols);
        gemm(
            self.cols,
            self.rows,
            other.cols,
            1.0,
            &self.data,
            1,
            self.cols as isize,
            &other.data,
            other.cols as isize,
            1,
            &mut out.data,
        );
        Ok(out)
    }

    /// `self * other^T`.
    pub fn matmul_transb(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                context: "matmul_transb",
                expected_rows: self.rows,
                expected_cols: other.rows,
                rows: other.rows,
                cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.rows);
        gemm(
            self.rows,
            self.cols,
            other.rows,
            1.0,
            &self.data,
            self.cols as isize,
            1,
            &other.data,
            1,
            other.cols as isize,
            &mut out.data,
        );
        Ok(out)
    }

    /// Cross product of two column windows of the same matrix:
    /// `alpha * self[:, a_start..a_start+len] * self[:, b_start..b_start+len]^T`.
    ///
    /// This is the covariance-estimator kernel; windows may overlap.
    pub(crate) fn windowed_cross(
        &self,
        a_start: usize,
        b_start: usize,
        len: usize,
        alpha: f64,
    ) -> Self {
        debug_assert!(a_start + len <= self.cols && b_start + len <= self.cols);
        let m = self.rows;
        let mut out = Self::zeros(m, m);
        gemm_ptr(
            m,
            len,
            m,
            alpha,
            unsafe { self.data.as_ptr().add(a_start) },
            self.cols as isize,
            1,
            unsafe { self.data.as_ptr().add(b_start) },
            1,
            self.cols as isize,
            out.data.as_mut_ptr(),
            m as isize,
            1,
        );
        out
    }

    /// Exact symmetrization `(M + M^T) / 2`; returns the largest asymmetry
    /// seen. Mirrored entries are written from one computation so the result
    /// is bitwise symmetric.
    pub fn symmetrize(&mut self) -> f64 {
        assert!(self.is_square());
        let n = self.rows;
        let mut max_asym = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = self.data[i * n + j];
                let b = self.data[j * n + i];
                max_asym = max_asym.max((a - b).abs());
                let v = 0.5 * (a + b);
                self.data[i * n + j] = v;
                self.data[j * n + i] = v;
            }
        }
        max_asym
    }
}

#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: &[f64],
    rsa: isize,
    csa: isize,
    b: &[f64],
    rsb: isize,
    csb: isize,
    c: &mut [f64],
) {
    gemm_ptr(
        m,
        k,
        n,
        alpha,
        a.as_ptr(),
        rsa,
        csa,
        b.as_ptr(),
        rsb,
        csb,
        c.as_mut_ptr(),
        n as isize,
        1,
    );
}

#[allow(clippy::too_many_arguments)]
fn gemm_ptr(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: *const f64,
    rsa: isize,
    csa: isize,
    b: *const f64,
    rsb: isize,
    csb: isize,
    c: *mut f64,
    rsc: isize,
    csc: isize,
) {
    // Strides describe a valid view for each operand; the output buffer is
    // freshly allocated by the callers and never aliases the inputs.
    unsafe {
        matrixmultiply::dgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, 0.0, c, rsc, csc);
    }
}
