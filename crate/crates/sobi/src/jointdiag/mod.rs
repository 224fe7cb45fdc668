//! Joint approximate diagonalization of whitened lagged covariances: the
//! classical Givens-rotation sweep solver and the Schur-decomposition
//! route.

pub mod givens;
pub mod schur;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

/// Sum of squared off-diagonal entries.
pub fn off(m: &RealMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(off_unchecked(m))
}

pub(crate) fn off_unchecked(m: &RealMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let v = m.get(i, j);
                acc += v * v;
            }
        }
    }
    acc
}

/// Remove the permutation/sign ambiguity of an orthogonal unmixer: columns
/// are ordered by descending diagonal of `U^T M U` against the reference
/// matrix and each column's largest-magnitude entry is made positive.
/// Returns the smallest gap between adjacent ordered diagonal values; a
/// tiny gap means the ordering is arbitrary.
pub(crate) fn canonicalize_unmixer(u: &mut RealMatrix, reference: &RealMatrix) -> f64 {
    let n = u.rows();
    let mu = reference.matmul(u).expect("square factors");
    let mut diag: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let mut d = 0.0;
            for i in 0..n {
                d += u.get(i, j) * mu.get(i, j);
            }
            (d, j)
        })
        .collect();
    diag.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let mut out = RealMatrix::zeros(n, n);
    for (new_col, &(_, old_col)) in diag.iter().enumerate() {
        let mut best = 0;
        let mut best_abs = -1.0_f64;
        for i in 0..n {
            let a = u.get(i, old_col).abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        let sign = if u.get(best, old_col) < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            out.set(i, new_col, sign * u.get(i, old_col));
        }
    }
    *u = out;

    let mut min_gap = f64::INFINITY;
    for w in diag.windows(2) {
        min_gap = min_gap.min((w[0].0 - w[1].0).abs());
    }
    min_gap
}

#[cfg(test)]
pub(crate) mod testutil {
    use crate::matrix::RealMatrix;
    use crate::whitening::LaggedCovarianceSet;

    /// Set of symmetric matrices sharing the conjugating factor `q`.
    pub(crate) fn conjugated_set(q: &RealMatrix, diagonals: &[Vec<f64>]) -> LaggedCovarianceSet {
        let n = q.rows();
        let mats: Vec<RealMatrix> = diagonals
            .iter()
            .map(|d| {
                let mut dm = RealMatrix::zeros(n, n);
                for (i, v) in d.iter().enumerate() {
                    dm.set(i, i, *v);
                }
                q.matmul(&dm).unwrap().matmul_transb(q).unwrap()
            })
            .collect();
        let lags = (1..=mats.len()).collect();
        LaggedCovarianceSet::new(lags, mats).unwrap()
    }

    /// Largest principal angle between matched columns, after greedy
    /// matching on |dot|.
    pub(crate) fn matched_column_angle(a: &RealMatrix, b: &RealMatrix) -> f64 {
        let n = a.rows();
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for j in 0..n {
            let mut best = (0usize, -1.0_f64);
            for k in 0..n {
                if used[k] {
                    continue;
                }
                let dot: f64 = (0..n).map(|i| a.get(i, j) * b.get(i, k)).sum();
                if dot.abs() > best.1 {
                    best = (k, dot.abs());
                }
            }
            used[best.0] = true;
            worst = worst.max(best.1.min(1.0).acos());
        }
        worst
    }
}
