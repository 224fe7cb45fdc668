//! Domain types for multichannel recordings and synthetic ground-truth
//! mixtures.
//!
//! The generator produces stationary sources whose lagged autocovariances
//! differ from each other, which is what makes the mixtures identifiable
//! from second-order statistics alone. All randomness comes from a named
//! portable generator (ChaCha8) so outputs reproduce bit-for-bit across
//! platforms for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::matrix::RealMatrix;

/// Name of the pseudo-random generator; recorded in report metadata.
pub const RNG_NAME: &str = "chacha8";

/// Samples discarded from the start of each AR(1) stream so the retained
/// segment is approximately stationary.
pub const AR_BURN_IN: usize = 256;

/// Minimum pairwise gap between AR(1) coefficients.
pub const MIN_AR_GAP: f64 = 0.05;

/// One synthetic source: a first-order autoregressive stream or a sinusoid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceKind {
    Ar1 { phi: f64 },
    Sinusoid { freq_hz: f64 },
}

/// Per-source generation plan. Sinusoid frequencies are interpreted
/// against `sample_rate_hz`.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    pub kinds: Vec<SourceKind>,
    pub sample_rate_hz: f64,
}

impl SourceSpec {
    pub fn ar1(phis: &[f64]) -> Self {
        Self {
            kinds: phis.iter().map(|&phi| SourceKind::Ar1 { phi }).collect(),
            sample_rate_hz: 160.0,
        }
    }

    pub fn sinusoids(freqs_hz: &[f64], sample_rate_hz: f64) -> Self {
        Self {
            kinds: freqs_hz
                .iter()
                .map(|&freq_hz| SourceKind::Sinusoid { freq_hz })
                .collect(),
            sample_rate_hz,
        }
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    /// Check the identifiability constraints: AR coefficients bounded and
    /// pairwise separated, sinusoid frequencies distinct and below Nyquist.
    pub fn validate(&self) -> Result<()> {
        if self.kinds.is_empty() {
            return Err(Error::InvalidSourceSpec("no sources specified".into()));
        }
        let phis: Vec<f64> = self
            .kinds
            .iter()
            .filter_map(|k| match k {
                SourceKind::Ar1 { phi } => Some(*phi),
                _ => None,
            })
            .collect();
        let freqs: Vec<f64> = self
            .kinds
            .iter()
            .filter_map(|k| match k {
                SourceKind::Sinusoid { freq_hz } => Some(*freq_hz),
                _ => None,
            })
            .collect();
        for &phi in &phis {
            if !phi.is_finite() || phi.abs() > 0.99 {
                return Err(Error::InvalidSourceSpec(format!(
                    "AR coefficient {phi} outside [-0.99, 0.99]"
                )));
            }
        }
        for i in 0..phis.len() {
            for j in (i + 1)..phis.len() {
                if (phis[i] - phis[j]).abs() < MIN_AR_GAP {
                    return Err(Error::InvalidSourceSpec(format!(
                        "AR coefficients {} and {} closer than {MIN_AR_GAP}",
                        phis[i], phis[j]
                    )));
                }
            }
        }
        if !freqs.is_empty() {
            if !self.sample_rate_hz.is_finite() || self.sample_rate_hz <= 0.0 {
                return Err(Error::InvalidSourceSpec(
                    "sinusoid sources need a positive sample rate".into(),
                ));
            }
            for &f in &freqs {
                if !f.is_finite() || f <= 0.0 || f >= self.sample_rate_hz / 2.0 {
                    return Err(Error::InvalidSourceSpec(format!(
                        "frequency {f} Hz outside (0, {}) Hz",
                        self.sample_rate_hz / 2.0
                    )));
                }
            }
            for i in 0..freqs.len() {
                for j in (i + 1)..freqs.len() {
                    if (freqs[i] - freqs[j]).abs() < 1e-9 {
                        return Err(Error::InvalidSourceSpec(format!(
                            "duplicate sinusoid frequency {} Hz",
                            freqs[i]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Multichannel time series: `channels x samples` with optional sample
/// rate (0 means unknown) and one label per channel.
#[derive(Debug, Clone)]
pub struct Recording {
    pub data: RealMatrix,
    pub sample_rate_hz: f64,
    pub labels: Vec<String>,
}

impl Recording {
    pub fn new(data: RealMatrix, sample_rate_hz: f64, labels: Vec<String>) -> Result<Self> {
        if labels.len() != data.rows() {
            return Err(Error::InvalidConfig(format!(
                "{} labels for {} channels",
                labels.len(),
                data.rows()
            )));
        }
        if sample_rate_hz < 0.0 || !sample_rate_hz.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "invalid sample rate {sample_rate_hz}"
            )));
        }
        Ok(Self {
            data,
            sample_rate_hz,
            labels,
        })
    }

    pub fn with_default_labels(data: RealMatrix, sample_rate_hz: f64) -> Self {
        let labels = (1..=data.rows()).map(|i| format!("ch{i}")).collect();
        Self {
            data,
            sample_rate_hz,
            labels,
        }
    }

    pub fn channels(&self) -> usize {
        self.data.rows()
    }

    pub fn samples(&self) -> usize {
        self.data.cols()
    }

    /// Copy of the data with per-channel sample means removed.
    pub fn centered_data(&self) -> RealMatrix {
        let mut out = self.data.clone();
        let t = out.cols();
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            let mean = row.iter().sum::<f64>() / t as f64;
            for v in row {
                *v -= mean;
            }
        }
        out
    }
}

/// Known mixture used to score separation quality on synthetic data.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub mixing: RealMatrix,
    pub sources: RealMatrix,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl GroundTruth {
    /// Validates shape compatibility, noise level, and that the mixing
    /// matrix has full column rank (smallest singular value above
    /// `1e-10 x` the largest).
    pub fn new(mixing: RealMatrix, sources: RealMatrix, noise_sigma: f64, seed: u64) -> Result<Self> {
        if mixing.cols() != sources.rows() {
            return Err(Error::DimensionMismatch {
                context: "ground truth mixing/sources",
                expected_rows: mixing.cols(),
                expected_cols: sources.cols(),
                rows: sources.rows(),
                cols: sources.cols(),
            });
        }
        if !noise_sigma.is_finite() || noise_sigma < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "noise sigma {noise_sigma} must be finite and nonnegative"
            )));
        }
        let sv = singular_values(&mixing)?;
        let largest = sv[0];
        let smallest = sv[sv.len() - 1];
        if smallest.is_nan() || smallest <= 1e-10 * largest {
            return Err(Error::InvalidConfig(format!(
                "mixing matrix is rank deficient (singular values {largest:e} .. {smallest:e})"
            )));
        }
        Ok(Self {
            mixing,
            sources,
            noise_sigma,
            seed,
        })
    }

    pub fn channels(&self) -> usize {
        self.mixing.rows()
    }

    pub fn num_sources(&self) -> usize {
        self.mixing.cols()
    }
}

fn source_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64 + 1);
    rng
}

fn noise_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    rng
}

/// Generate `n x samples` mutually independent, zero-mean, unit-variance
/// source rows. Deterministic for a given seed; each row draws from its
/// own ChaCha8 stream.
pub fn generate_sources(spec: &SourceSpec, samples: usize, seed: u64) -> Result<RealMatrix> {
    spec.validate()?;
    if samples < 256 {
        return Err(Error::InvalidConfig(format!(
            "need at least 256 samples, got {samples}"
        )));
    }
    let n = spec.len();
    let mut out = RealMatrix::zeros(n, samples);
    for (row, kind) in spec.kinds.iter().enumerate() {
        let mut rng = source_rng(seed, row);
        match *kind {
            SourceKind::Ar1 { phi } => {
                let mut x = 0.0_f64;
                for t in 0..AR_BURN_IN {
                    let e: f64 = rng.sample(StandardNormal);
                    x = if t == 0 { e } else { phi * x + e };
                }
                for t in 0..samples {
                    let e: f64 = rng.sample(StandardNormal);
                    x = phi * x + e;
                    out.set(row, t, x);
                }
            }
            SourceKind::Sinusoid { freq_hz } => {
                let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let w = std::f64::consts::TAU * freq_hz / spec.sample_rate_hz;
                for t in 0..samples {
                    out.set(row, t, (w * t as f64 + phase).sin());
                }
            }
        }
        normalize_row(&mut out, row)?;
    }
    Ok(out)
}

fn normalize_row(m: &mut RealMatrix, row: usize) -> Result<()> {
    let t = m.cols() as f64;
    let r = m.row_mut(row);
    let mean = r.iter().sum::<f64>() / t;
    for v in r.iter_mut() {
        *v -= mean;
    }
    let var = r.iter().map(|v| v * v).sum::<f64>() / t;
    if var <= 0.0 {
        return Err(Error::ZeroVarianceRow { row });
    }
    let inv = 1.0 / var.sqrt();
    for v in r.iter_mut() {
        *v *= inv;
    }
    Ok(())
}

/// Random orthogonal matrix (QR of a Gaussian draw): a convenient
/// well-conditioned mixing matrix for synthetic experiments.
pub fn random_orthogonal(n: usize, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut g = RealMatrix::zeros(n, n);
    for v in g.data_mut() {
        *v = rng.sample(StandardNormal);
    }
    crate::linalg::qr_orthonormalize(&g).expect("square input")
}

/// Mix ground-truth sources through the mixing matrix and add white
/// Gaussian sensor noise of standard deviation `noise_sigma`.
pub fn mix(truth: &GroundTruth) -> Result<Recording> {
    let mut data = truth.mixing.matmul(&truth.sources)?;
    if truth.noise_sigma > 0.0 {
        let mut rng = noise_rng(truth.seed);
        let sigma = truth.noise_sigma;
        for v in data.data_mut() {
            let e: f64 = rng.sample(StandardNormal);
            *v += sigma * e;
        }
    }
    Ok(Recording::with_default_labels(data, 0.0))
}
