//! Shared dense linear-algebra kernels: a cyclic-Jacobi symmetric
//! eigensolver, Householder QR orthonormalization, and singular values.

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching orthonormal
/// eigenvectors as columns. The input is symmetrized defensively.
pub fn symmetric_eigen(m: &RealMatrix) -> Result<(Vec<f64>, RealMatrix)> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let mut a = m.clone();
    a.symmetrize();
    // Rows of vt are the eigenvectors; transposed storage keeps the
    // rotation updates contiguous.
    let mut vt = RealMatrix::identity(n);

    let scale = a.frobenius_norm();
    let tol = 1e-15 * scale.max(f64::MIN_POSITIVE);

    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol {
                    continue;
                }
                rotated = true;
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = 0.5 * (2.0 * apq).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                rotate_symmetric(&mut a, p, q, c, s);
                rotate_rows(&mut vt, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).partial_cmp(&a.get(i, i)).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = RealMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, vt.get(src, i));
        }
    }
    Ok((values, vectors))
}

/// In-place symmetric conjugation `A <- R A R^T` for a plane rotation in
/// coordinates (p, q). Mirrored entries are copied so symmetry stays exact.
pub(crate) fn rotate_symmetric(a: &mut RealMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.cols();
    let app = a.get(p, p);
    let aqq = a.get(q, q);
    let apq = a.get(p, q);

    {
        let (rp, rq) = a.two_rows_mut(p, q);
        for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
            let vp = *x;
            let vq = *y;
            *x = c * vp + s * vq;
            *y = -s * vp + c * vq;
        }
    }
    for j in 0..n {
        let vp = a.get(p, j);
        let vq = a.get(q, j);
        a.set(j, p, vp);
        a.set(j, q, vq);
    }
    let new_pp = c * c * app + 2.0 * c * s * apq + s * s * aqq;
    let new_qq = s * s * app - 2.0 * c * s * apq + c * c * aqq;
    let new_pq = c * s * (aqq - app) + (c * c - s * s) * apq;
    a.set(p, p, new_pp);
    a.set(q, q, new_qq);
    a.set(p, q, new_pq);
    a.set(q, p, new_pq);
}

/// Rotate rows p and q of a matrix: used to accumulate the transposed
/// eigenvector/unmixer factors.
pub(crate) fn rotate_rows(m: &mut RealMatrix, p: usize, q: usize, c: f64, s: f64) {
    let (rp, rq) = m.two_rows_mut(p, q);
    for (x, y) in rp.iter_mut().zip(rq.iter_mut()) {
        let vp = *x;
        let vq = *y;
        *x = c * vp + s * vq;
        *y = -s * vp + c * vq;
    }
}

/// Orthonormal factor of a thin QR decomposition of a square matrix, with
/// column signs fixed so the diagonal of R is nonnegative. For an input
/// that is already close to orthonormal this is a numerically gentle
/// re-orthonormalization that stays close to the input.
pub fn qr_orthonormalize(v: &RealMatrix) -> Result<RealMatrix> {
    if !v.is_square() {
        return Err(Error::NotSquare {
            rows: v.rows(),
            cols: v.cols(),
        });
    }
    let n = v.rows();
    let mut r = v.clone();
    let mut q = RealMatrix::identity(n);

    for k in 0..n {
        // Householder vector for column k below the diagonal.
        let mut norm2 = 0.0;
        for i in k..n {
            let x = r.get(i, k);
            norm2 += x * x;
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r.get(k, k);
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        let mut v_house = vec![0.0; n - k];
        v_house[0] = x0 - alpha;
        for i in (k + 1)..n {
            v_house[i - k] = r.get(i, k);
        }
        let vnorm2: f64 = v_house.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r <- H r ; q <- q H  with H = I - 2 v v^T / (v^T v)
        for j in k..n {
            let mut dot = 0.0;
            for i in k..n {
                dot += v_house[i - k] * r.get(i, j);
            }
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                let val = r.get(i, j) - f * v_house[i - k];
                r.set(i, j, val);
            }
        }
        for i in 0..n {
            let mut dot = 0.0;
            for j in k..n {
                dot += q.get(i, j) * v_house[j - k];
            }
            let f = 2.0 * dot / vnorm2;
            for j in k..n {
                let val = q.get(i, j) - f * v_house[j - k];
                q.set(i, j, val);
            }
        }
    }

    for k in 0..n {
        if r.get(k, k) < 0.0 {
            for i in 0..n {
                let v = -q.get(i, k);
                q.set(i, k, v);
            }
        }
    }
    Ok(q)
}

/// Singular values (descending) via the eigenvalues of the smaller Gram
/// matrix.
pub fn singular_values(m: &RealMatrix) -> Result<Vec<f64>> {
    let gram = if m.rows() >= m.cols() {
        m.matmul_transa(m)?
    } else {
        m.matmul_transb(m)?
    };
    let (vals, _) = symmetric_eigen(&gram)?;
    Ok(vals.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}
