//! Whitening stage: zero-lag covariance eigendecomposition, source count
//! and noise-variance estimation, the whitening matrix, and the set of
//! whitened lagged covariances handed to the joint diagonalizers.

use crate::error::{Error, Result};
use crate::linalg::{rotate_rows, symmetric_eigen};
use crate::matrix::RealMatrix;
use crate::model::Recording;

/// Relative floor below which the signal eigenvalues are considered
/// indistinguishable from the noise estimate.
const PD_FLOOR: f64 = 1e-12;

/// How the whitening matrix is obtained: from the eigendecomposition of
/// the zero-lag covariance (the default; cheaper on channels x channels
/// problems) or from a one-sided Jacobi SVD of the centered data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WhiteningMethod {
    #[default]
    Eigen,
    Svd,
}

impl std::str::FromStr for WhiteningMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "eig" | "eigen" => Ok(WhiteningMethod::Eigen),
            "svd" => Ok(WhiteningMethod::Svd),
            other => Err(Error::InvalidConfig(format!(
                "unknown whitening method {other:?}"
            ))),
        }
    }
}

/// Whitening matrix plus the spectral quantities it was built from.
#[derive(Debug, Clone)]
pub struct WhiteningResult {
    /// `n x m` whitening matrix; row i is `(lambda_i - sigma^2)^{-1/2} h_i^T`.
    pub w: RealMatrix,
    /// Retained source count.
    pub n: usize,
    /// Noise-variance estimate (mean of the discarded eigenvalues; 0 when
    /// all are retained).
    pub sigma2: f64,
    /// All channel-covariance eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Retained orthonormal eigenvectors as columns (`m x n`).
    pub eigenvectors: RealMatrix,
}

impl WhiteningResult {
    pub fn channels(&self) -> usize {
        self.w.cols()
    }

    /// Closed-form Moore-Penrose pseudo-inverse of the whitening matrix:
    /// column i is `(lambda_i - sigma^2)^{1/2} h_i`.
    pub fn pseudo_inverse(&self) -> RealMatrix {
        let m = self.channels();
        let mut out = RealMatrix::zeros(m, self.n);
        for j in 0..self.n {
            let gain = (self.eigenvalues[j] - self.sigma2).sqrt();
            for i in 0..m {
                out.set(i, j, gain * self.eigenvectors.get(i, j));
            }
        }
        out
    }
}

/// Ordered set of whitened, exactly symmetric lagged covariance matrices.
#[derive(Debug, Clone)]
pub struct LaggedCovarianceSet {
    lags: Vec<usize>,
    matrices: Vec<RealMatrix>,
    max_asymmetry: f64,
}

impl LaggedCovarianceSet {
    /// Build from matrices that are already supposed to be symmetric;
    /// asymmetry beyond `1e-8` of each matrix norm is rejected, anything
    /// below is folded away so the stored matrices are exactly symmetric.
    pub fn new(lags: Vec<usize>, matrices: Vec<RealMatrix>) -> Result<Self> {
        let mut set = Self::symmetrized(lags, matrices)?;
        let scale = set
            .matrices
            .iter()
            .map(RealMatrix::frobenius_norm)
            .fold(0.0_f64, f64::max);
        if set.max_asymmetry > 1e-8 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NotSymmetric {
                max_asymmetry: set.max_asymmetry,
            });
        }
        set.max_asymmetry = 0.0;
        Ok(set)
    }

    /// Build from raw (possibly asymmetric) covariance estimates,
    /// symmetrizing each one and recording the largest asymmetry folded.
    pub fn symmetrized(lags: Vec<usize>, mut matrices: Vec<RealMatrix>) -> Result<Self> {
        if lags.is_empty() || lags.len() != matrices.len() {
            return Err(Error::InvalidLags(format!(
                "{} lags for {} matrices",
                lags.len(),
                matrices.len()
            )));
        }
        if lags[0] == 0 || lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLags(
                "lags must be strictly increasing and positive".into(),
            ));
        }
        let n = matrices[0].rows();
        let mut max_asymmetry = 0.0_f64;
        for m in &mut matrices {
            if !m.is_square() || m.rows() != n {
                return Err(Error::DimensionMismatch {
                    context: "lagged covariance set",
                    expected_rows: n,
                    expected_cols: n,
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
            max_asymmetry = max_asymmetry.max(m.symmetrize());
        }
        Ok(Self {
            lags,
            matrices,
            max_asymmetry,
        })
    }

    pub fn lags(&self) -> &[usize] {
        &self.lags
    }

    pub fn matrices(&self) -> &[RealMatrix] {
        &self.matrices
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    /// Matrix side length.
    pub fn order(&self) -> usize {
        self.matrices[0].rows()
    }

    /// Largest asymmetry folded away when the set was built.
    pub fn max_asymmetry(&self) -> f64 {
        self.max_asymmetry
    }

    /// Sum of squared Frobenius norms over the set.
    pub fn norm_squared(&self) -> f64 {
        self.matrices
            .iter()
            .map(|m| {
                let f = m.frobenius_norm();
                f * f
            })
            .sum()
    }
}

/// Default lag set 1..=min(100, samples/3).
pub fn default_lags(samples: usize) -> Vec<usize> {
    (1..=100.min(samples / 3)).collect()
}

/// Centered sample covariance at the given lag:
/// `R(tau) = 1/(T-tau) * sum_t x(t+tau) x(t)^T` with per-channel means
/// removed. The zero-lag estimate is symmetrized.
pub fn sample_covariance(rec: &Recording, tau: usize) -> Result<RealMatrix> {
    let xc = rec.centered_data();
    covariance_centered(&xc, tau)
}

fn covariance_centered(xc: &RealMatrix, tau: usize) -> Result<RealMatrix> {
    let t = xc.cols();
    if 2 * tau >= t {
        return Err(Error::LagOutOfRange {
            lag: tau,
            samples: t,
        });
    }
    let len = t - tau;
    let mut cov = xc.windowed_cross(tau, 0, len, 1.0 / len as f64);
    if tau == 0 {
        cov.symmetrize();
    }
    Ok(cov)
}

/// Whitening from the zero-lag covariance: symmetric eigendecomposition,
/// retained-count selection, noise-variance estimate, and the scaled
/// eigenvector rows. When `n` is absent it is chosen by the largest
/// relative eigengap, ties broken toward keeping more sources.
pub fn estimate_whitening(r0: &RealMatrix, n: Option<usize>) -> Result<WhiteningResult> {
    if !r0.is_square() {
        return Err(Error::NotSquare {
            rows: r0.rows(),
            cols: r0.cols(),
        });
    }
    let (eigenvalues, vectors) = symmetric_eigen(r0)?;
    whitening_from_spectrum(eigenvalues, vectors, n)
}

/// Whitening via a one-sided Jacobi SVD of the centered data: the same
/// spectral quantities as [`estimate_whitening`] without forming the
/// covariance. Offered for comparing whitening variants; the
/// eigendecomposition route is the default.
pub fn estimate_whitening_svd(rec: &Recording, n: Option<usize>) -> Result<WhiteningResult> {
    let mut x = rec.centered_data();
    let m = x.rows();
    let t = x.cols() as f64;
    let mut rot = RealMatrix::identity(m);

    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..m.saturating_sub(1) {
            for q in (p + 1)..m {
                let (mut app, mut aqq, mut apq) = (0.0_f64, 0.0_f64, 0.0_f64);
                for (a, b) in x.row(p).iter().zip(x.row(q)) {
                    app += a * a;
                    aqq += b * b;
                    apq += a * b;
                }
                if apq.abs() <= 1e-12 * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let theta = 0.5 * (2.0 * apq).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                rotate_rows(&mut x, p, q, c, s);
                rotate_rows(&mut rot, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut spectrum: Vec<(f64, usize)> = (0..m)
        .map(|i| {
            let norm2: f64 = x.row(i).iter().map(|v| v * v).sum();
            (norm2 / t, i)
        })
        .collect();
    spectrum.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let eigenvalues: Vec<f64> = spectrum.iter().map(|&(v, _)| v).collect();
    let mut vectors = RealMatrix::zeros(m, m);
    for (col, &(_, src)) in spectrum.iter().enumerate() {
        for i in 0..m {
            vectors.set(i, col, rot.get(src, i));
        }
    }
    whitening_from_spectrum(eigenvalues, vectors, n)
}

fn whitening_from_spectrum(
    eigenvalues: Vec<f64>,
    vectors: RealMatrix,
    n: Option<usize>,
) -> Result<WhiteningResult> {
    let m = eigenvalues.len();
    let lambda1 = eigenvalues[0];
    if lambda1.is_nan() || lambda1 <= 0.0 {
        return Err(Error::DegenerateSignalSubspace {
            index: 0,
            value: lambda1,
        });
    }
    let floor = PD_FLOOR * lambda1;

    let n = match n {
        Some(n) => {
            if n == 0 || n > m {
                return Err(Error::InvalidConfig(format!(
                    "retained source count {n} outside 1..={m}"
                )));
            }
            n
        }
        None => select_source_count(&eigenvalues, floor),
    };

    let sigma2 = if n < m {
        eigenvalues[n..].iter().sum::<f64>() / (m - n) as f64
    } else {
        0.0
    };
    let gap = eigenvalues[n - 1] - sigma2;
    if gap <= floor {
        return Err(Error::DegenerateSignalSubspace {
            index: n - 1,
            value: gap,
        });
    }

    let mut w = RealMatrix::zeros(n, m);
    for i in 0..n {
        let inv = 1.0 / (eigenvalues[i] - sigma2).sqrt();
        for j in 0..m {
            w.set(i, j, inv * vectors.get(j, i));
        }
    }
    let mut retained = RealMatrix::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            retained.set(i, j, vectors.get(i, j));
        }
    }
    Ok(WhiteningResult {
        w,
        n,
        sigma2,
        eigenvalues,
        eigenvectors: retained,
    })
}

/// Largest relative eigengap rule. A trailing eigenvalue at or below the
/// positivity floor wins immediately (infinite gap); otherwise the ratio
/// `lambda_i / lambda_{i+1}` is maximized with ties broken toward larger
/// retained counts.
fn select_source_count(eigenvalues: &[f64], floor: f64) -> usize {
    let m = eigenvalues.len();
    if m == 1 {
        return 1;
    }
    for i in 0..m - 1 {
        if eigenvalues[i + 1] <= floor {
            return i + 1;
        }
    }
    let mut best = 0;
    let mut best_ratio = f64::NEG_INFINITY;
    for i in 0..m - 1 {
        let ratio = eigenvalues[i] / eigenvalues[i + 1];
        if ratio >= best_ratio {
            best_ratio = ratio;
            best = i;
        }
    }
    best + 1
}

/// Whitened, symmetrized covariance set `M(tau) = (C + C^T)/2` with
/// `C = W R(tau) W^T`, computed for every requested lag.
pub fn whitened_lagged_set(
    rec: &Recording,
    wr: &WhiteningResult,
    lags: &[usize],
) -> Result<LaggedCovarianceSet> {
    if wr.channels() != rec.channels() {
        return Err(Error::DimensionMismatch {
            context: "whitening matrix vs recording",
            expected_rows: wr.n,
            expected_cols: rec.channels(),
            rows: wr.w.rows(),
            cols: wr.w.cols(),
        });
    }
    let t = rec.samples();
    if lags.is_empty() {
        return Err(Error::InvalidLags("empty lag set".into()));
    }
    if let Some(&max) = lags.last() {
        if 2 * max >= t {
            return Err(Error::LagOutOfRange {
                lag: max,
                samples: t,
            });
        }
    }
    let xc = rec.centered_data();
    let g = wr.w.matmul(&xc)?;
    let mut matrices = Vec::with_capacity(lags.len());
    for &tau in lags {
        matrices.push(covariance_centered(&g, tau)?);
    }
    LaggedCovarianceSet::symmetrized(lags.to_vec(), matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_sources, mix, random_orthogonal, GroundTruth, SourceSpec};

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constant_recording_gives_zero_covariance() {
        let data = RealMatrix::new(2, 8, vec![3.0; 16]).unwrap();
        let rec = Recording::with_default_labels(data, 0.0);
        let cov = sample_covariance(&rec, 0).unwrap();
        assert_eq!(cov.max_abs(), 0.0);
    }

    #[test]
    fn hand_computed_covariance() {
        let data = RealMatrix::new(2, 3, vec![1.0, 2.0, 3.0, 1.0, 0.0, -1.0]).unwrap();
        let rec = Recording::with_default_labels(data, 0.0);
        let cov = sample_covariance(&rec, 0).unwrap();
        let e = 2.0 / 3.0;
        assert!(approx(cov.get(0, 0), e, 1e-15));
        assert!(approx(cov.get(0, 1), -e, 1e-15));
        assert!(approx(cov.get(1, 0), -e, 1e-15));
        assert!(approx(cov.get(1, 1), e, 1e-15));
    }

    #[test]
    fn white_sources_identity_mixing_give_identity_covariance() {
        let t = 40_000;
        let spec = SourceSpec::ar1(&[0.0, 0.1, -0.1, 0.2]);
        let s = generate_sources(&spec, t, 77).unwrap();
        let rec = Recording::with_default_labels(s, 0.0);
        let cov = sample_covariance(&rec, 0).unwrap();
        let mut err2 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                let d = cov.get(i, j) - want;
                err2 += d * d;
            }
        }
        assert!(err2.sqrt() < 5.0 * 4.0 / (t as f64).sqrt());
    }

    #[test]
    fn lag_out_of_range_rejected() {
        let data = RealMatrix::new(1, 10, (0..10).map(|v| v as f64).collect()).unwrap();
        let rec = Recording::with_default_labels(data, 0.0);
        assert!(sample_covariance(&rec, 5).is_err());
        assert!(sample_covariance(&rec, 4).is_ok());
    }

    #[test]
    fn whitening_of_diagonal_covariance() {
        let r0 = RealMatrix::new(2, 2, vec![4.0, 0.0, 0.0, 1.0]).unwrap();
        let wr = estimate_whitening(&r0, Some(2)).unwrap();
        assert_eq!(wr.sigma2, 0.0);
        assert_eq!(wr.eigenvalues, vec![4.0, 1.0]);
        // W = diag(1/2, 1) up to row sign
        assert!(approx(wr.w.get(0, 0).abs(), 0.5, 1e-12));
        assert!(approx(wr.w.get(0, 1).abs(), 0.0, 1e-12));
        assert!(approx(wr.w.get(1, 0).abs(), 0.0, 1e-12));
        assert!(approx(wr.w.get(1, 1).abs(), 1.0, 1e-12));
    }

    #[test]
    fn trailing_eigenvalues_become_noise_estimate() {
        let vals = [5.0, 4.0, 1.0, 1.0, 1.0];
        let mut r0 = RealMatrix::zeros(5, 5);
        for (i, v) in vals.iter().enumerate() {
            r0.set(i, i, *v);
        }
        let wr = estimate_whitening(&r0, Some(2)).unwrap();
        assert!(approx(wr.sigma2, 1.0, 1e-12));
        let s0 = 1.0 / (5.0_f64 - 1.0).sqrt();
        let s1 = 1.0 / (4.0_f64 - 1.0).sqrt();
        let r0_max: f64 = wr.w.row(0).iter().fold(0.0, |m, v| m.max(v.abs()));
        let r1_max: f64 = wr.w.row(1).iter().fold(0.0, |m, v| m.max(v.abs()));
        assert!(approx(r0_max, s0, 1e-12));
        assert!(approx(r1_max, s1, 1e-12));
    }

    #[test]
    fn whitening_identity_on_random_spd() {
        let q = random_orthogonal(6, 5);
        let mut d = RealMatrix::zeros(6, 6);
        for (i, v) in [6.0, 3.5, 2.0, 1.4, 0.9, 0.2].iter().enumerate() {
            d.set(i, i, *v);
        }
        let r0 = q.matmul(&d).unwrap().matmul_transb(&q).unwrap();
        let wr = estimate_whitening(&r0, Some(6)).unwrap();
        let prod = wr.w.matmul(&r0).unwrap().matmul_transb(&wr.w).unwrap();
        let mut err2 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                let want = if i == j { 1.0 } else { 0.0 };
                let d = prod.get(i, j) - want;
                err2 += d * d;
            }
        }
        assert!(err2.sqrt() < 1e-10, "|WRW^T - I| = {}", err2.sqrt());
    }

    #[test]
    fn eigengap_rule_and_degenerate_error() {
        // clear gap after two eigenvalues
        let mut r0 = RealMatrix::zeros(4, 4);
        for (i, v) in [8.0, 6.0, 0.5, 0.4].iter().enumerate() {
            r0.set(i, i, *v);
        }
        let wr = estimate_whitening(&r0, None).unwrap();
        assert_eq!(wr.n, 2);
        assert!(approx(wr.sigma2, 0.45, 1e-12));

        // all eigenvalues equal and n = m: whitening still fine (sigma2 = 0)
        let eye = RealMatrix::identity(3);
        assert!(estimate_whitening(&eye, Some(3)).is_ok());

        // retained eigenvalue equal to the noise mean: degenerate
        let mut flat = RealMatrix::zeros(3, 3);
        for i in 0..3 {
            flat.set(i, i, 2.0);
        }
        assert!(matches!(
            estimate_whitening(&flat, Some(2)).unwrap_err(),
            Error::DegenerateSignalSubspace { .. }
        ));

        // zero matrix is degenerate outright
        let zero = RealMatrix::zeros(2, 2);
        assert!(estimate_whitening(&zero, Some(1)).is_err());
    }

    #[test]
    fn zero_trailing_eigenvalue_caps_source_count() {
        let s = generate_sources(&SourceSpec::ar1(&[0.3, 0.7]), 4096, 41).unwrap();
        // 3 channels from 2 sources: rank-2 covariance
        let a = RealMatrix::new(3, 2, vec![1.0, 0.2, 0.1, 1.0, 0.5, -0.4]).unwrap();
        let rec = mix(&GroundTruth::new(a, s, 0.0, 41).unwrap()).unwrap();
        let r0 = sample_covariance(&rec, 0).unwrap();
        let wr = estimate_whitening(&r0, None).unwrap();
        assert_eq!(wr.n, 2);
    }

    #[test]
    fn white_noise_lagged_covariances_are_small() {
        use rand::{Rng, SeedableRng};
        let t = 30_000;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut s = RealMatrix::zeros(2, t);
        for v in s.data_mut() {
            *v = rng.sample::<f64, _>(rand_distr::StandardNormal);
        }
        let rec = Recording::with_default_labels(s, 0.0);
        let r0 = sample_covariance(&rec, 0).unwrap();
        let wr = estimate_whitening(&r0, Some(2)).unwrap();
        let set = whitened_lagged_set(&rec, &wr, &[1, 2, 3]).unwrap();
        for m in set.matrices() {
            assert!(m.max_abs() < 6.0 / (t as f64).sqrt());
        }
    }

    #[test]
    fn whitened_lagged_eigenvalues_match_source_autocovariances() {
        let t = 20_000;
        let phis = [0.2, 0.5, 0.8];
        let s = generate_sources(&SourceSpec::ar1(&phis), t, 7).unwrap();
        let a = random_orthogonal(3, 8);
        let rec = mix(&GroundTruth::new(a, s.clone(), 0.0, 7).unwrap()).unwrap();
        let r0 = sample_covariance(&rec, 0).unwrap();
        let wr = estimate_whitening(&r0, Some(3)).unwrap();
        let tau = 1;
        let set = whitened_lagged_set(&rec, &wr, &[tau]).unwrap();
        let (mut eig, _) = symmetric_eigen(&set.matrices()[0]).unwrap();

        // oracle: per-source sample autocovariance at the same lag
        let mut rho: Vec<f64> = (0..3)
            .map(|i| {
                let row = s.row(i);
                row[tau..]
                    .iter()
                    .zip(&row[..t - tau])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / (t - tau) as f64
            })
            .collect();
        rho.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (e, r) in eig.iter().zip(&rho) {
            assert!(approx(*e, *r, 0.03), "eig {e} vs rho {r}");
        }
    }

    #[test]
    fn lagged_set_is_exactly_symmetric() {
        let s = generate_sources(&SourceSpec::ar1(&[0.4, 0.9]), 4096, 3).unwrap();
        let a = random_orthogonal(2, 4);
        let rec = mix(&GroundTruth::new(a, s, 0.01, 3).unwrap()).unwrap();
        let r0 = sample_covariance(&rec, 0).unwrap();
        let wr = estimate_whitening(&r0, Some(2)).unwrap();
        let set = whitened_lagged_set(&rec, &wr, &[1, 5, 9]).unwrap();
        for m in set.matrices() {
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                }
            }
        }
        assert!(set.max_asymmetry() > 0.0);
    }

    #[test]
    fn scale_equivariance() {
        let s = generate_sources(&SourceSpec::ar1(&[0.3, 0.8]), 8192, 21).unwrap();
        let a = random_orthogonal(2, 22);
        let rec = mix(&GroundTruth::new(a, s, 0.0, 21).unwrap()).unwrap();
        let c = 3.7;
        let mut scaled = rec.clone();
        scaled.data.scale(c);

        let r0 = sample_covariance(&rec, 0).unwrap();
        let r0s = sample_covariance(&scaled, 0).unwrap();
        let wr = estimate_whitening(&r0, Some(2)).unwrap();
        let wrs = estimate_whitening(&r0s, Some(2)).unwrap();
        for (l, ls) in wr.eigenvalues.iter().zip(&wrs.eigenvalues) {
            assert!(approx(*ls, c * c * l, 1e-9 * c * c * l.abs().max(1.0)));
        }
        for (w, ws) in wr.w.data().iter().zip(wrs.w.data()) {
            assert!((ws - w / c).abs() < 1e-10 * w.abs().max(1.0));
        }
        let set = whitened_lagged_set(&rec, &wr, &[1, 2]).unwrap();
        let sets = whitened_lagged_set(&scaled, &wrs, &[1, 2]).unwrap();
        for (m, ms) in set.matrices().iter().zip(sets.matrices()) {
            for (x, y) in m.data().iter().zip(ms.data()) {
                assert!((x - y).abs() < 1e-10 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn svd_whitening_agrees_with_eigen_whitening() {
        let s = generate_sources(&SourceSpec::ar1(&[0.2, 0.6, 0.9]), 6000, 31).unwrap();
        let a = random_orthogonal(3, 32);
        let rec = mix(&GroundTruth::new(a, s, 0.05, 31).unwrap()).unwrap();
        let r0 = sample_covariance(&rec, 0).unwrap();
        let eig = estimate_whitening(&r0, Some(3)).unwrap();
        let svd = estimate_whitening_svd(&rec, Some(3)).unwrap();
        for (l1, l2) in eig.eigenvalues.iter().zip(&svd.eigenvalues) {
            assert!(approx(*l1, *l2, 1e-8 * l1.max(1.0)));
        }
        // rows agree up to sign
        for i in 0..3 {
            let dot: f64 = eig.w.row(i).iter().zip(svd.w.row(i)).map(|(a, b)| a * b).sum();
            let n1: f64 = eig.w.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            let n2: f64 = svd.w.row(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(dot.abs() / (n1 * n2) > 1.0 - 1e-8);
        }
    }

    #[test]
    fn default_lag_rule() {
        assert_eq!(default_lags(9600).len(), 100);
        assert_eq!(default_lags(30).len(), 10);
        assert_eq!(default_lags(7), vec![1, 2]);
    }
}
