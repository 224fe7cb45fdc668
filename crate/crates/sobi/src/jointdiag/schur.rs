//! Joint diagonalization through one real Schur decomposition: factor the
//! first whitened lagged covariance as `Q B Q^T`, eigendecompose the
//! triangular factor by back-substitution, and take `U = Q V`.

use crate::error::{Error, Result};
use crate::linalg::qr_orthonormalize;
use crate::matrix::RealMatrix;
use crate::whitening::LaggedCovarianceSet;

use super::{canonicalize_unmixer, off_unchecked};

/// Relative eigengap tolerance: pairwise diagonal gaps at or below
/// `GAP_TOL_FACTOR * |B|_F` count as degenerate.
pub const GAP_TOL_FACTOR: f64 = 1e-8;

/// QR iteration budget, in steps per matrix order.
const QR_BUDGET_PER_ORDER: usize = 30;

/// Which lagged covariance the Schur route diagonalizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LagChoice {
    /// The first lag in the set.
    #[default]
    First,
    /// The lag whose matrix has the largest minimum eigengap.
    BestGap,
}

impl std::str::FromStr for LagChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "first" => Ok(LagChoice::First),
            "best-gap" | "bestgap" | "best_gap" => Ok(LagChoice::BestGap),
            other => Err(Error::InvalidConfig(format!(
                "unknown lag choice {other:?}"
            ))),
        }
    }
}

/// Real Schur factors `M = Q B Q^T`.
#[derive(Debug, Clone)]
pub struct SchurFactors {
    /// Orthogonal factor.
    pub q: RealMatrix,
    /// Quasi-upper-triangular factor; 2x2 diagonal bumps appear only for
    /// complex conjugate eigenvalue pairs.
    pub b: RealMatrix,
    /// QR iteration steps used.
    pub iterations: usize,
}

/// Result of the Schur-route unmixer.
#[derive(Debug, Clone)]
pub struct SchurSobiResult {
    /// Orthogonal unmixer, canonicalized like the sweep solver's.
    pub u: RealMatrix,
    /// Smallest pairwise gap between diagonal entries of the triangular
    /// factor of the selected matrix.
    pub eigengap: f64,
    /// Total off-diagonal mass of `U^T M(tau) U` over the whole set.
    pub residual_off: f64,
    /// Lag whose matrix was Schur-decomposed.
    pub selected_lag: usize,
    /// Ordering gap from canonicalization (see the sweep solver).
    pub min_diag_gap: f64,
    /// QR iteration steps used by the decomposition.
    pub iterations: usize,
}

/// Real Schur decomposition by Householder Hessenberg reduction followed
/// by Francis double-shift QR with deflation.
pub fn real_schur(m: &RealMatrix) -> Result<SchurFactors> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if let Some(idx) = m.data().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index: idx });
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut q = RealMatrix::identity(n);
    if n == 1 {
        return Ok(SchurFactors {
            q,
            b: h,
            iterations: 0,
        });
    }

    hessenberg(&mut h, &mut q);

    let budget = QR_BUDGET_PER_ORDER * n;
    let norm = h.frobenius_norm();
    let mut iterations = 0usize;
    let mut stall = 0usize;
    let mut hi = n - 1;

    loop {
        // Flush negligible subdiagonals.
        for i in 0..hi {
            let denom = h.get(i, i).abs() + h.get(i + 1, i + 1).abs();
            let thresh = f64::EPSILON * if denom > 0.0 { denom } else { norm };
            if h.get(i + 1, i).abs() <= thresh {
                h.set(i + 1, i, 0.0);
            }
        }
        // Active block [lo, hi] ending at hi.
        let mut lo = hi;
        while lo > 0 && h.get(lo, lo - 1) != 0.0 {
            lo -= 1;
        }
        if lo == hi {
            // 1x1 converged.
            if hi == 0 {
                break;
            }
            hi -= 1;
            stall = 0;
            continue;
        }
        if lo + 1 == hi {
            split_two_by_two(&mut h, &mut q, lo);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            stall = 0;
            continue;
        }

        iterations += 1;
        stall += 1;
        if iterations > budget {
            return Err(Error::NoConvergence { iterations });
        }
        let (ssum, sprod) = if stall.is_multiple_of(10) {
            // Ad-hoc exceptional shift to break rare cycling.
            let s1 = h.get(hi, hi - 1).abs() + h.get(hi - 1, hi - 2).abs();
            (1.5 * s1, 0.125 * s1 * s1)
        } else {
            let a = h.get(hi - 1, hi - 1);
            let b = h.get(hi - 1, hi);
            let c = h.get(hi, hi - 1);
            let d = h.get(hi, hi);
            (a + d, a * d - b * c)
        };
        francis_step(&mut h, &mut q, lo, hi, ssum, sprod);
    }

    // The chase leaves exact zeros below the first subdiagonal; make that
    // structural guarantee explicit.
    for i in 2..n {
        for j in 0..i - 1 {
            h.set(i, j, 0.0);
        }
    }
    Ok(SchurFactors {
        q,
        b: h,
        iterations,
    })
}

/// Householder reduction to upper Hessenberg form, accumulating the
/// transformations.
fn hessenberg(h: &mut RealMatrix, q: &mut RealMatrix) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        // Entries below the subdiagonal; nothing to do when they are
        // already zero.
        let mut tail2 = 0.0;
        for i in (k + 2)..n {
            let x = h.get(i, k);
            tail2 += x * x;
        }
        if tail2 == 0.0 {
            continue;
        }
        let x0 = h.get(k + 1, k);
        let norm2 = x0 * x0 + tail2;
        let alpha = if x0 >= 0.0 {
            -norm2.sqrt()
        } else {
            norm2.sqrt()
        };
        let mut v = vec![0.0; n - k - 1];
        v[0] = x0 - alpha;
        for i in (k + 2)..n {
            v[i - k - 1] = h.get(i, k);
        }
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vnorm2;

        // rows k+1..n from the left
        for j in 0..n {
            let mut dot = 0.0;
            for i in 0..v.len() {
                dot += v[i] * h.get(k + 1 + i, j);
            }
            let f = beta * dot;
            for i in 0..v.len() {
                let val = h.get(k + 1 + i, j) - f * v[i];
                h.set(k + 1 + i, j, val);
            }
        }
        // columns k+1..n from the right
        for i in 0..n {
            let mut dot = 0.0;
            for j in 0..v.len() {
                dot += h.get(i, k + 1 + j) * v[j];
            }
            let f = beta * dot;
            for j in 0..v.len() {
                let val = h.get(i, k + 1 + j) - f * v[j];
                h.set(i, k + 1 + j, val);
            }
        }
        // accumulate
        for i in 0..n {
            let mut dot = 0.0;
            for j in 0..v.len() {
                dot += q.get(i, k + 1 + j) * v[j];
            }
            let f = beta * dot;
            for j in 0..v.len() {
                let val = q.get(i, k + 1 + j) - f * v[j];
                q.set(i, k + 1 + j, val);
            }
        }
        // the reflected column is exactly (alpha, 0, ..., 0)
        h.set(k + 1, k, alpha);
        for i in (k + 2)..n {
            h.set(i, k, 0.0);
        }
    }
}

/// One implicit double-shift QR step on the active block, chasing the
/// bulge with 3x3 (finally 2x2) Householder reflectors applied across the
/// full matrix.
fn francis_step(h: &mut RealMatrix, q: &mut RealMatrix, lo: usize, hi: usize, s: f64, p: f64) {
    let n = h.rows();
    let mut x = h.get(lo, lo) * h.get(lo, lo) + h.get(lo, lo + 1) * h.get(lo + 1, lo)
        - s * h.get(lo, lo)
        + p;
    let mut y = h.get(lo + 1, lo) * (h.get(lo, lo) + h.get(lo + 1, lo + 1) - s);
    let mut z = if lo + 2 <= hi {
        h.get(lo + 1, lo) * h.get(lo + 2, lo + 1)
    } else {
        0.0
    };

    for k in lo..hi {
        let third = k + 2 <= hi;
        let w = if third { [x, y, z] } else { [x, y, 0.0] };
        let len = if third { 3 } else { 2 };
        if let Some((v, beta)) = householder(&w[..len]) {
            // left: rows k..k+len
            for j in 0..n {
                let mut dot = 0.0;
                for (i, vi) in v.iter().enumerate() {
                    dot += vi * h.get(k + i, j);
                }
                let f = beta * dot;
                for (i, vi) in v.iter().enumerate() {
                    let val = h.get(k + i, j) - f * vi;
                    h.set(k + i, j, val);
                }
            }
            // right: columns k..k+len
            for i in 0..n {
                let mut dot = 0.0;
                for (j, vj) in v.iter().enumerate() {
                    dot += h.get(i, k + j) * vj;
                }
                let f = beta * dot;
                for (j, vj) in v.iter().enumerate() {
                    let val = h.get(i, k + j) - f * vj;
                    h.set(i, k + j, val);
                }
            }
            for i in 0..n {
                let mut dot = 0.0;
                for (j, vj) in v.iter().enumerate() {
                    dot += q.get(i, k + j) * vj;
                }
                let f = beta * dot;
                for (j, vj) in v.iter().enumerate() {
                    let val = q.get(i, k + j) - f * vj;
                    q.set(i, k + j, val);
                }
            }
        }
        if k > lo {
            // entries the reflector just annihilated in column k-1
            h.set(k + 1, k - 1, 0.0);
            if third {
                h.set(k + 2, k - 1, 0.0);
            }
        }
        if k < hi {
            x = h.get(k + 1, k);
            if k + 2 <= hi {
                y = h.get(k + 2, k);
                z = if k + 3 <= hi { h.get(k + 3, k) } else { 0.0 };
            } else {
                y = 0.0;
                z = 0.0;
            }
        }
    }
}

/// Householder vector and scale for a 2- or 3-vector: `(I - beta v v^T) w`
/// lands on a multiple of the first axis. None when already there. The
/// tail mass is summed directly (never by subtraction, which cancels to
/// zero for a tiny bulge under a large head) and the vector is scaled
/// first so squaring cannot over- or underflow.
fn householder(w: &[f64]) -> Option<(Vec<f64>, f64)> {
    let scale: f64 = w.iter().map(|v| v.abs()).sum();
    if scale == 0.0 {
        return None;
    }
    let mut v: Vec<f64> = w.iter().map(|x| x / scale).collect();
    let tail2: f64 = v[1..].iter().map(|x| x * x).sum();
    if tail2 == 0.0 {
        return None;
    }
    let norm = (v[0] * v[0] + tail2).sqrt();
    let alpha = if v[0] >= 0.0 { -norm } else { norm };
    v[0] -= alpha;
    let vnorm2: f64 = v.iter().map(|x| x * x).sum();
    Some((v, 2.0 / vnorm2))
}

/// Resolve a trailing 2x2 block: rotate it to upper triangular form when
/// its eigenvalues are real, standardize it as a bump when they are
/// complex. The rotation and the transformed block entries come from
/// [`standardize_2x2`], so the written-back zeros are exact.
fn split_two_by_two(h: &mut RealMatrix, q: &mut RealMatrix, lo: usize) {
    let n = h.rows();
    let (i, j) = (lo, lo + 1);
    let (na, nb, nc, nd, cs, sn) = standardize_2x2(h.get(i, i), h.get(i, j), h.get(j, i), h.get(j, j));
    // similarity by R = [[cs, -sn], [sn, cs]]: rows from R^T, columns by R
    for col in 0..n {
        let ri = h.get(i, col);
        let rj = h.get(j, col);
        h.set(i, col, cs * ri + sn * rj);
        h.set(j, col, -sn * ri + cs * rj);
    }
    for row in 0..n {
        let ci = h.get(row, i);
        let cj = h.get(row, j);
        h.set(row, i, cs * ci + sn * cj);
        h.set(row, j, -sn * ci + cs * cj);
    }
    for row in 0..n {
        let ci = q.get(row, i);
        let cj = q.get(row, j);
        q.set(row, i, cs * ci + sn * cj);
        q.set(row, j, -sn * ci + cs * cj);
    }
    h.set(i, i, na);
    h.set(i, j, nb);
    h.set(j, i, nc);
    h.set(j, j, nd);
}

fn sign_of(x: f64, y: f64) -> f64 {
    if y >= 0.0 {
        x.abs()
    } else {
        -x.abs()
    }
}

/// Standard real 2x2 Schur standardization: returns the transformed block
/// `(a, b, c, d)` and the rotation `(cs, sn)` such that conjugating by
/// `[[cs, -sn], [sn, cs]]` yields that block. `c` comes back exactly zero
/// when the eigenvalues are real, otherwise the block is a standardized
/// complex-pair bump with equal diagonal.
#[allow(clippy::many_single_char_names)]
fn standardize_2x2(
    mut a: f64,
    mut b: f64,
    mut c: f64,
    mut d: f64,
) -> (f64, f64, f64, f64, f64, f64) {
    let eps = f64::EPSILON;
    let (mut cs, mut sn);
    if c == 0.0 {
        cs = 1.0;
        sn = 0.0;
    } else if b == 0.0 {
        cs = 0.0;
        sn = 1.0;
        std::mem::swap(&mut a, &mut d);
        b = -c;
        c = 0.0;
    } else if a - d == 0.0 && sign_of(1.0, b) != sign_of(1.0, c) {
        cs = 1.0;
        sn = 0.0;
    } else {
        let temp = a - d;
        let p = 0.5 * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * sign_of(1.0, b) * sign_of(1.0, c);
        let scale = p.abs().max(bcmax);
        let mut z = p / scale * p + bcmax / scale * bcmis;
        if z >= 4.0 * eps {
            // real eigenvalues
            z = p + sign_of(scale.sqrt() * z.sqrt(), p);
            a = d + z;
            d -= bcmax / z * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = c / tau;
            b -= c;
            c = 0.0;
        } else {
            // complex pair, or real and almost equal
            let sigma = b + c;
            let tau = sigma.hypot(temp);
            cs = (0.5 * (1.0 + sigma.abs() / tau)).sqrt();
            sn = -(p / (tau * cs)) * sign_of(1.0, sigma);
            let aa = a * cs + b * sn;
            let bb = -a * sn + b * cs;
            let cc = c * cs + d * sn;
            let dd = -c * sn + d * cs;
            a = aa * cs + cc * sn;
            b = bb * cs + dd * sn;
            c = -aa * sn + cc * cs;
            d = -bb * sn + dd * cs;
            let temp = 0.5 * (a + d);
            a = temp;
            d = temp;
            if c != 0.0 {
                if b != 0.0 {
                    if sign_of(1.0, b) == sign_of(1.0, c) {
                        // real eigenvalues after all: finish the reduction
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        let p = sign_of(sab * sac, c);
                        let tau = 1.0 / (b + c).abs().sqrt();
                        a = temp + p;
                        d = temp - p;
                        b -= c;
                        c = 0.0;
                        let cs1 = sab * tau;
                        let sn1 = sac * tau;
                        let old_cs = cs;
                        cs = old_cs * cs1 - sn * sn1;
                        sn = old_cs * sn1 + sn * cs1;
                    }
                } else {
                    b = -c;
                    c = 0.0;
                    let old_cs = cs;
                    cs = -sn;
                    sn = old_cs;
                }
            }
        }
    }
    (a, b, c, d, cs, sn)
}

/// Eigenvector matrix of an upper-triangular factor with distinct
/// diagonal, one back-substitution per column. Column i is unit-length
/// with its i-th entry positive, so a diagonal input maps to the
/// identity.
pub fn triangular_eigenvectors(b: &RealMatrix) -> Result<RealMatrix> {
    if !b.is_square() {
        return Err(Error::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    let n = b.rows();
    for i in 1..n {
        if b.get(i, i - 1) != 0.0 {
            return Err(Error::QuasiTriangularBlock { row: i - 1 });
        }
        for j in 0..i.saturating_sub(1) {
            if b.get(i, j) != 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "matrix is not upper triangular (entry at {i},{j})"
                )));
            }
        }
    }
    check_eigengap(b, false)?;

    let mut v = RealMatrix::zeros(n, n);
    let mut col = vec![0.0; n];
    for i in 0..n {
        col[..n].fill(0.0);
        col[i] = 1.0;
        for j in (0..i).rev() {
            let mut acc = 0.0;
            for k in (j + 1)..=i {
                acc += b.get(j, k) * col[k];
            }
            col[j] = -acc / (b.get(j, j) - b.get(i, i));
        }
        let norm = col[..=i].iter().map(|v| v * v).sum::<f64>().sqrt();
        for (row, val) in col[..=i].iter().enumerate() {
            v.set(row, i, val / norm);
        }
    }
    Ok(v)
}

/// Smallest pairwise gap between diagonal entries; errors at or below the
/// relative tolerance.
fn check_eigengap(b: &RealMatrix, suggest_best_gap: bool) -> Result<f64> {
    let n = b.rows();
    if n < 2 {
        return Ok(f64::INFINITY);
    }
    let gap_tol = GAP_TOL_FACTOR * b.frobenius_norm();
    let mut min_gap = f64::INFINITY;
    let mut pair = (0, 1);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (b.get(i, i) - b.get(j, j)).abs();
            if gap < min_gap {
                min_gap = gap;
                pair = (i, j);
            }
        }
    }
    if min_gap <= gap_tol {
        return Err(Error::DegenerateSpectrum {
            i: pair.0,
            j: pair.1,
            gap: min_gap,
            gap_tol,
            suggest_best_gap,
        });
    }
    Ok(min_gap)
}

/// Unmix from one Schur decomposition: pick a matrix from the set, factor
/// it as `Q B Q^T`, eigendecompose `B` by back-substitution, re-orthonormalize
/// the eigenvector basis with a thin QR step, and return `U = Q V`.
pub fn schur_unmixer(set: &LaggedCovarianceSet, lag_choice: LagChoice) -> Result<SchurSobiResult> {
    let idx = match lag_choice {
        LagChoice::First => 0,
        LagChoice::BestGap => best_gap_index(set)?,
    };
    let selected = &set.matrices()[idx];
    let factors = real_schur(selected)?;
    for i in 1..factors.b.rows() {
        if factors.b.get(i, i - 1) != 0.0 {
            return Err(Error::QuasiTriangularBlock { row: i - 1 });
        }
    }
    let eigengap = check_eigengap(&factors.b, matches!(lag_choice, LagChoice::First))?;

    let v = triangular_eigenvectors(&factors.b)?;
    let v = qr_orthonormalize(&v)?;
    let mut u = factors.q.matmul(&v)?;
    let min_diag_gap = canonicalize_unmixer(&mut u, &set.matrices()[0]);

    let mut residual_off = 0.0;
    for m in set.matrices() {
        let conj = u.matmul_transa(&m.matmul(&u)?)?;
        residual_off += off_unchecked(&conj);
    }
    Ok(SchurSobiResult {
        u,
        eigengap,
        residual_off,
        selected_lag: set.lags()[idx],
        min_diag_gap,
        iterations: factors.iterations,
    })
}

/// Index of the set member with the largest minimum eigengap.
fn best_gap_index(set: &LaggedCovarianceSet) -> Result<usize> {
    let mut best = 0usize;
    let mut best_gap = f64::NEG_INFINITY;
    for (k, m) in set.matrices().iter().enumerate() {
        let (vals, _) = crate::linalg::symmetric_eigen(m)?;
        let mut gap = f64::INFINITY;
        for w in vals.windows(2) {
            gap = gap.min((w[0] - w[1]).abs());
        }
        if gap > best_gap {
            best_gap = gap;
            best = k;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jointdiag::givens::{default_tol, joint_diagonalize, DEFAULT_MAX_SWEEPS};
    use crate::jointdiag::testutil::{conjugated_set, matched_column_angle};
    use crate::model::random_orthogonal;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(n: usize, seed: u64) -> RealMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = RealMatrix::zeros(n, n);
        for v in m.data_mut() {
            *v = rng.sample(StandardNormal);
        }
        m
    }

    fn orthogonality_error(q: &RealMatrix) -> f64 {
        let n = q.rows();
        let qtq = q.matmul_transa(q).unwrap();
        let mut err2 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                let d = qtq.get(i, j) - want;
                err2 += d * d;
            }
        }
        err2.sqrt()
    }

    fn reconstruction_error(m: &RealMatrix, f: &SchurFactors) -> f64 {
        let rec = f.q.matmul(&f.b).unwrap().matmul_transb(&f.q).unwrap();
        let mut err2 = 0.0;
        for (a, b) in rec.data().iter().zip(m.data()) {
            err2 += (a - b) * (a - b);
        }
        err2.sqrt() / m.frobenius_norm().max(1e-300)
    }

    #[test]
    fn triangular_input_is_a_fixed_point() {
        let b = RealMatrix::new(3, 3, vec![3.0, 1.0, 2.0, 0.0, 2.0, -1.0, 0.0, 0.0, 1.0]).unwrap();
        let f = real_schur(&b).unwrap();
        assert_eq!(f.q, RealMatrix::identity(3));
        assert_eq!(f.b, b);
        assert_eq!(f.iterations, 0);
    }

    #[test]
    fn symmetric_two_by_two() {
        let m = RealMatrix::new(2, 2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let f = real_schur(&m).unwrap();
        let mut d = [f.b.get(0, 0), f.b.get(1, 1)];
        d.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((d[0] - 3.0).abs() < 1e-12);
        assert!((d[1] - 1.0).abs() < 1e-12);
        assert!(f.b.get(1, 0) == 0.0);
        assert!(f.b.get(0, 1).abs() < 1e-12);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for v in f.q.data() {
            assert!((v.abs() - r).abs() < 1e-12);
        }
    }

    #[test]
    fn random_symmetric_reconstructs_and_diagonalizes() {
        for seed in 0..5 {
            let mut m = random_matrix(5, seed);
            m.symmetrize();
            let f = real_schur(&m).unwrap();
            assert!(orthogonality_error(&f.q) < 1e-10);
            assert!(reconstruction_error(&m, &f) < 1e-10);
            // strictly triangular part of B is negligible for symmetric input
            let mut upper = 0.0_f64;
            for i in 0..5 {
                for j in 0..5 {
                    if j > i {
                        upper = upper.max(f.b.get(i, j).abs());
                    } else if j < i {
                        assert_eq!(f.b.get(i, j), 0.0);
                    }
                }
            }
            assert!(upper < 1e-10 * m.frobenius_norm());
        }
    }

    #[test]
    fn general_random_matrices_reconstruct() {
        for seed in 10..16 {
            let m = random_matrix(7, seed);
            let f = real_schur(&m).unwrap();
            assert!(orthogonality_error(&f.q) < 1e-10, "seed {seed}");
            assert!(reconstruction_error(&m, &f) < 1e-9, "seed {seed}");
            // quasi-triangular: no two consecutive subdiagonal entries
            for i in 2..7 {
                assert!(
                    f.b.get(i, i - 1) == 0.0 || f.b.get(i - 1, i - 2) == 0.0,
                    "seed {seed}: consecutive bumps"
                );
            }
        }
    }

    #[test]
    fn rotation_matrix_yields_complex_bump() {
        // plane rotation by 0.4 rad has complex eigenvalues
        let (s, c) = (0.4_f64.sin(), 0.4_f64.cos());
        let m = RealMatrix::new(2, 2, vec![c, -s, s, c]).unwrap();
        let f = real_schur(&m).unwrap();
        assert!(f.b.get(1, 0) != 0.0);
        assert!(matches!(
            triangular_eigenvectors(&f.b).unwrap_err(),
            Error::QuasiTriangularBlock { .. }
        ));
    }

    #[test]
    fn eigenvectors_of_diagonal_matrix() {
        let mut b = RealMatrix::zeros(3, 3);
        for (i, v) in [3.0, 1.0, -2.0].iter().enumerate() {
            b.set(i, i, *v);
        }
        let v = triangular_eigenvectors(&b).unwrap();
        assert_eq!(v, RealMatrix::identity(3));
    }

    #[test]
    fn eigenvectors_by_single_back_substitution() {
        let b = RealMatrix::new(2, 2, vec![3.0, 1.0, 0.0, 1.0]).unwrap();
        let v = triangular_eigenvectors(&b).unwrap();
        assert_eq!(v.column(0), vec![1.0, 0.0]);
        // second column solves 2*v0 + v1 = 0: (1, -2)/sqrt(5) up to sign
        let s5 = 5.0_f64.sqrt();
        assert!((v.get(0, 1).abs() - 1.0 / s5).abs() < 1e-15);
        assert!((v.get(1, 1).abs() - 2.0 / s5).abs() < 1e-15);
        assert!(v.get(0, 1) * v.get(1, 1) < 0.0);
    }

    #[test]
    fn eigenvectors_of_random_triangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 4;
        let mut b = RealMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.sample(StandardNormal);
                b.set(i, j, v);
            }
        }
        // well separated diagonal
        for (i, d) in [2.0, -1.0, 0.5, 4.0].iter().enumerate() {
            b.set(i, i, *d);
        }
        let v = triangular_eigenvectors(&b).unwrap();
        let bv = b.matmul(&v).unwrap();
        let mut err = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                err = err.max((bv.get(i, j) - b.get(j, j) * v.get(i, j)).abs());
            }
        }
        assert!(err < 1e-9 * b.frobenius_norm());
    }

    #[test]
    fn degenerate_diagonal_rejected() {
        let b = RealMatrix::new(2, 2, vec![1.0, 0.5, 0.0, 1.0 + 1e-12]).unwrap();
        assert!(matches!(
            triangular_eigenvectors(&b).unwrap_err(),
            Error::DegenerateSpectrum { .. }
        ));
    }

    #[test]
    fn unmixer_recovers_conjugating_rotation() {
        let q0 = random_orthogonal(4, 51);
        let set = conjugated_set(
            &q0,
            &[
                vec![3.0, 1.5, -0.5, 0.75],
                vec![1.0, -2.0, 0.25, 2.0],
            ],
        );
        let res = schur_unmixer(&set, LagChoice::First).unwrap();
        assert!(matched_column_angle(&res.u, &q0) < 1e-6);
        assert!(orthogonality_error(&res.u) < 1e-10);
        assert!(res.residual_off < 1e-18 * set.norm_squared());
        assert_eq!(res.selected_lag, 1);
    }

    #[test]
    fn diagonal_first_matrix_is_fixed_point() {
        let set = conjugated_set(
            &RealMatrix::identity(3),
            &[vec![4.0, 2.0, -1.0], vec![1.0, 3.0, 2.0]],
        );
        let res = schur_unmixer(&set, LagChoice::First).unwrap();
        assert!(matched_column_angle(&res.u, &RealMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn scaled_identity_first_matrix_is_degenerate() {
        let mut eye = RealMatrix::identity(3);
        eye.scale(2.0);
        let good = conjugated_set(&random_orthogonal(3, 61), &[vec![3.0, 1.0, -2.0]]);
        let set = LaggedCovarianceSet::new(
            vec![1, 2],
            vec![eye, good.matrices()[0].clone()],
        )
        .unwrap();
        let err = schur_unmixer(&set, LagChoice::First).unwrap_err();
        match &err {
            Error::DegenerateSpectrum {
                suggest_best_gap, ..
            } => assert!(*suggest_best_gap),
            other => panic!("unexpected error {other}"),
        }
        assert!(err.to_string().contains("best-gap"));

        // best-gap picks the second matrix and succeeds
        let res = schur_unmixer(&set, LagChoice::BestGap).unwrap();
        assert_eq!(res.selected_lag, 2);
        assert!(res.eigengap > 1.0);
    }

    #[test]
    fn agrees_with_sweep_solver_on_exact_sets() {
        for seed in 0..8 {
            let n = [2, 3, 4, 6][seed as usize % 4];
            let q0 = random_orthogonal(n, 100 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
            let diags: Vec<Vec<f64>> = (0..4)
                .map(|_| {
                    (0..n)
                        .map(|i| (i as f64 + 1.0) + 0.3 * rng.sample::<f64, _>(StandardNormal))
                        .collect()
                })
                .collect();
            // make sure the first diagonal is well separated
            let mut first: Vec<f64> = (0..n).map(|i| i as f64 * 1.5 - 2.0).collect();
            first.reverse();
            let mut all = vec![first];
            all.extend(diags);
            let set = conjugated_set(&q0, &all);

            let g = joint_diagonalize(&set, default_tol(n), DEFAULT_MAX_SWEEPS).unwrap();
            let s = schur_unmixer(&set, LagChoice::First).unwrap();
            let angle = matched_column_angle(&g.u, &s.u);
            assert!(angle < 1e-6, "seed {seed}: angle {angle}");
        }
    }

    #[test]
    fn symmetric_input_keeps_v_near_identity() {
        let q0 = random_orthogonal(5, 71);
        let set = conjugated_set(&q0, &[vec![5.0, 3.0, 1.0, -1.0, -3.0]]);
        let m = &set.matrices()[0];
        let f = real_schur(m).unwrap();
        let v = triangular_eigenvectors(&f.b).unwrap();
        let v = qr_orthonormalize(&v).unwrap();
        let mut dev = 0.0_f64;
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((v.get(i, j) - want).abs());
            }
        }
        assert!(dev < 1e-6, "V deviates from identity by {dev}");
    }
}
