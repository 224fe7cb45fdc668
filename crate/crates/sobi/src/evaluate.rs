//! End-to-end separation pipelines, separation-quality metrics, and the
//! timing harness that compares the two diagonalization routes on equal
//! configurations.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jointdiag::givens::{default_tol, joint_diagonalize, DEFAULT_MAX_SWEEPS};
use crate::jointdiag::schur::{schur_unmixer, LagChoice};
use crate::matrix::RealMatrix;
use crate::model::{GroundTruth, Recording, RNG_NAME};
use crate::whitening::{
    default_lags, estimate_whitening, estimate_whitening_svd, sample_covariance,
    whitened_lagged_set, WhiteningMethod, WhiteningResult,
};

/// Which joint diagonalizer drives the separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Givens,
    Schur,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Givens => write!(f, "givens"),
            Method::Schur => write!(f, "schur"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "givens" => Ok(Method::Givens),
            "schur" => Ok(Method::Schur),
            other => Err(Error::InvalidConfig(format!("unknown method {other:?}"))),
        }
    }
}

/// Pipeline knobs; `None` fields fall back to the module defaults.
#[derive(Debug, Clone)]
pub struct SeparationConfig {
    /// Retained source count; estimated by the eigengap rule when absent.
    pub n: Option<usize>,
    /// Lag set; `1..=min(100, T/3)` when absent.
    pub lags: Option<Vec<usize>>,
    /// Rotation threshold for the sweep solver; `1e-8/sqrt(n)` when absent.
    pub tol: Option<f64>,
    /// Sweep budget for the sweep solver.
    pub max_sweeps: usize,
    /// Which matrix the Schur route decomposes.
    pub lag_choice: LagChoice,
    /// How the whitening matrix is computed.
    pub whitening: WhiteningMethod,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            n: None,
            lags: None,
            tol: None,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            lag_choice: LagChoice::default(),
            whitening: WhiteningMethod::default(),
        }
    }
}

/// Per-run diagnostics carried alongside the factor matrices.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    /// Residual off-diagonal mass over the whitened set.
    pub final_off: f64,
    /// Sweeps used (sweep solver only).
    pub sweeps: Option<usize>,
    /// Eigengap of the decomposed matrix (Schur route only).
    pub eigengap: Option<f64>,
    /// Lag actually decomposed (Schur route only).
    pub selected_lag: Option<usize>,
    /// Retained source count.
    pub n: usize,
    /// Noise-variance estimate.
    pub sigma2: f64,
    /// Lags of the whitened covariance set.
    pub lags: Vec<usize>,
    /// Gap between adjacent ordered diagonal values during output
    /// canonicalization; below 1e-6 the source ordering is arbitrary.
    pub min_diag_gap: f64,
}

/// Everything a separation run produces.
#[derive(Debug, Clone)]
pub struct SeparationResult {
    pub method: Method,
    /// Orthogonal unmixer from the whitened domain.
    pub u: RealMatrix,
    /// Whitening matrix (n x m).
    pub w: RealMatrix,
    /// Estimated sources `U^T W x(t)` from the mean-removed data.
    pub sources_hat: RealMatrix,
    /// Estimated mixing `W^+ U`.
    pub mixing_hat: RealMatrix,
    /// Time spent in the algorithm itself (no I/O).
    pub wall_time: Duration,
    pub diagnostics: Diagnostics,
}

/// Run the full pipeline: whitening, whitened lagged covariances, the
/// chosen joint diagonalizer, and source/mixing recovery.
pub fn separate(rec: &Recording, method: Method, config: &SeparationConfig) -> Result<SeparationResult> {
    let t = rec.samples();
    if t <= rec.channels() {
        return Err(Error::TooFewSamples {
            channels: rec.channels(),
            samples: t,
        });
    }
    let lags = match &config.lags {
        Some(lags) => lags.clone(),
        None => default_lags(t),
    };
    if lags.is_empty() {
        return Err(Error::InvalidLags(format!(
            "no usable lags for {t} samples"
        )));
    }

    let start = Instant::now();
    let wr: WhiteningResult = match config.whitening {
        WhiteningMethod::Eigen => {
            let r0 = sample_covariance(rec, 0)?;
            estimate_whitening(&r0, config.n)?
        }
        WhiteningMethod::Svd => estimate_whitening_svd(rec, config.n)?,
    };
    let set = whitened_lagged_set(rec, &wr, &lags)?;

    let (u, mut diagnostics) = match method {
        Method::Givens => {
            let tol = config.tol.unwrap_or_else(|| default_tol(wr.n));
            let res = joint_diagonalize(&set, tol, config.max_sweeps)?;
            let d = Diagnostics {
                final_off: res.final_off,
                sweeps: Some(res.sweeps),
                eigengap: None,
                selected_lag: None,
                n: wr.n,
                sigma2: wr.sigma2,
                lags: lags.clone(),
                min_diag_gap: res.min_diag_gap,
            };
            (res.u, d)
        }
        Method::Schur => {
            let res = schur_unmixer(&set, config.lag_choice)?;
            let d = Diagnostics {
                final_off: res.residual_off,
                sweeps: None,
                eigengap: Some(res.eigengap),
                selected_lag: Some(res.selected_lag),
                n: wr.n,
                sigma2: wr.sigma2,
                lags: lags.clone(),
                min_diag_gap: res.min_diag_gap,
            };
            (res.u, d)
        }
    };

    let xc = rec.centered_data();
    let unmixer = u.matmul_transa(&wr.w)?;
    let sources_hat = unmixer.matmul(&xc)?;
    let mixing_hat = wr.pseudo_inverse().matmul(&u)?;
    let wall_time = start.elapsed();
    diagnostics.n = wr.n;

    Ok(SeparationResult {
        method,
        u,
        w: wr.w,
        sources_hat,
        mixing_hat,
        wall_time,
        diagnostics,
    })
}

/// Permutation/scale-invariant distance of a gain matrix from a scaled
/// permutation; 0 means perfect separation, 1 is the worst case.
pub fn amari_index(g: &RealMatrix) -> Result<f64> {
    if !g.is_square() {
        return Err(Error::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let n = g.rows();
    if n < 2 {
        return Err(Error::InvalidConfig(
            "amari index needs at least a 2x2 gain matrix".into(),
        ));
    }
    let mut row_sum = vec![0.0_f64; n];
    let mut row_max = vec![0.0_f64; n];
    let mut col_sum = vec![0.0_f64; n];
    let mut col_max = vec![0.0_f64; n];
    for i in 0..n {
        for j in 0..n {
            let a = g.get(i, j).abs();
            row_sum[i] += a;
            col_sum[j] += a;
            row_max[i] = row_max[i].max(a);
            col_max[j] = col_max[j].max(a);
        }
    }
    if let Some(i) = row_max.iter().position(|&m| m == 0.0) {
        return Err(Error::ZeroGainLine {
            what: "row",
            index: i,
        });
    }
    if let Some(j) = col_max.iter().position(|&m| m == 0.0) {
        return Err(Error::ZeroGainLine {
            what: "column",
            index: j,
        });
    }
    let rows: f64 = (0..n).map(|i| row_sum[i] / row_max[i] - 1.0).sum();
    let cols: f64 = (0..n).map(|j| col_sum[j] / col_max[j] - 1.0).sum();
    Ok((rows + cols) / (2.0 * n as f64 * (n - 1) as f64))
}

/// One greedy source-to-source match.
#[derive(Debug, Clone, Copy)]
pub struct MatchedPair {
    /// Row of the estimated sources.
    pub estimated: usize,
    /// Row of the reference sources it was assigned to.
    pub reference: usize,
    /// Absolute Pearson correlation of the pair.
    pub r: f64,
}

/// Greedy assignment between estimated and reference sources on the
/// absolute-correlation matrix, largest correlations first.
#[derive(Debug, Clone)]
pub struct MatchedCorrelation {
    pub pairs: Vec<MatchedPair>,
}

impl MatchedCorrelation {
    pub fn min_abs_r(&self) -> f64 {
        self.pairs.iter().map(|p| p.r).fold(f64::INFINITY, f64::min)
    }

    pub fn mean_abs_r(&self) -> f64 {
        self.pairs.iter().map(|p| p.r).sum::<f64>() / self.pairs.len() as f64
    }

    pub fn rs(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.r).collect()
    }
}

/// Match estimated sources against references by absolute correlation,
/// removing each row and column once used. Pairs are reported in
/// estimated-row order.
pub fn matched_correlation(reference: &RealMatrix, estimated: &RealMatrix) -> Result<MatchedCorrelation> {
    if reference.rows() != estimated.rows() || reference.cols() != estimated.cols() {
        return Err(Error::DimensionMismatch {
            context: "matched correlation",
            expected_rows: reference.rows(),
            expected_cols: reference.cols(),
            rows: estimated.rows(),
            cols: estimated.cols(),
        });
    }
    let n = reference.rows();
    let t = reference.cols();

    let center = |m: &RealMatrix, which: &'static str| -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
        let mut rows = Vec::with_capacity(n);
        let mut norms = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = m.row(i).to_vec();
            let mean = row.iter().sum::<f64>() / t as f64;
            for v in &mut row {
                *v -= mean;
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                let _ = which;
                return Err(Error::ZeroVarianceRow { row: i });
            }
            norms.push(norm);
            rows.push(row);
        }
        Ok((rows, norms))
    };
    let (ref_rows, ref_norms) = center(reference, "reference")?;
    let (est_rows, est_norms) = center(estimated, "estimated")?;

    let mut corr = vec![vec![0.0_f64; n]; n];
    for (i, est) in est_rows.iter().enumerate() {
        for (j, re) in ref_rows.iter().enumerate() {
            let dot: f64 = est.iter().zip(re).map(|(a, b)| a * b).sum();
            corr[i][j] = (dot / (est_norms[i] * ref_norms[j])).abs();
        }
    }

    let mut est_used = vec![false; n];
    let mut ref_used = vec![false; n];
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut best = (0usize, 0usize, -1.0_f64);
        for i in 0..n {
            if est_used[i] {
                continue;
            }
            for j in 0..n {
                if ref_used[j] {
                    continue;
                }
                if corr[i][j] > best.2 {
                    best = (i, j, corr[i][j]);
                }
            }
        }
        est_used[best.0] = true;
        ref_used[best.1] = true;
        pairs.push(MatchedPair {
            estimated: best.0,
            reference: best.1,
            r: best.2,
        });
    }
    pairs.sort_by_key(|p| p.estimated);
    Ok(MatchedCorrelation { pairs })
}

// --- benchmark report ---------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InputInfo {
    pub channels: usize,
    pub samples: usize,
    pub sample_rate_hz: f64,
    pub source: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigInfo {
    pub n: Option<usize>,
    pub num_lags: usize,
    pub lags: String,
    pub tol: f64,
    pub max_sweeps: usize,
    pub lag_choice: String,
    pub whitening: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnvInfo {
    pub host: String,
    pub build_profile: String,
    pub rng: String,
    pub warmup_runs: usize,
    pub preprocessing: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MethodBench {
    pub method: Method,
    pub wall_times_s: Vec<f64>,
    pub median_s: f64,
    pub best_s: f64,
    pub final_off: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amari: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matched_corr: Option<Vec<f64>>,
}

/// Head-to-head timing comparison of the two methods on one input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: String,
    /// `median(givens) / median(schur)`.
    pub speedup: f64,
    pub input: InputInfo,
    pub config: ConfigInfo,
    pub env: EnvInfo,
    pub results: Vec<MethodBench>,
}

impl BenchReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report serialization cannot fail")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::ReportParse(e.to_string()))
    }

    pub fn method(&self, method: Method) -> Option<&MethodBench> {
        self.results.iter().find(|r| r.method == method)
    }
}

fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        0.5 * (v[mid - 1] + v[mid])
    } else {
        v[mid]
    }
}

fn compact_lags(lags: &[usize]) -> String {
    let contiguous = lags
        .windows(2)
        .all(|w| w[1] == w[0] + 1);
    if contiguous && lags.len() > 2 {
        format!("{}..{}", lags[0], lags[lags.len() - 1])
    } else {
        lags.iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// Run both methods `repeats` times after one untimed warm-up each and
/// assemble the report. Ground truth, when supplied, adds the quality
/// metrics.
pub fn bench(
    rec: &Recording,
    config: &SeparationConfig,
    repeats: usize,
    truth: Option<&GroundTruth>,
    source_label: &str,
) -> Result<BenchReport> {
    if repeats < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 repeats, got {repeats}"
        )));
    }
    let mut results = Vec::new();
    let mut resolved_n = 0usize;
    for method in [Method::Givens, Method::Schur] {
        let fail = |e: Error| Error::MethodFailed {
            method: match method {
                Method::Givens => "givens",
                Method::Schur => "schur",
            },
            source: Box::new(e),
        };
        separate(rec, method, config).map_err(fail)?; // warm-up, untimed
        let mut wall_times_s = Vec::with_capacity(repeats);
        let mut last = None;
        for _ in 0..repeats {
            let run = separate(rec, method, config).map_err(fail)?;
            wall_times_s.push(run.wall_time.as_secs_f64());
            last = Some(run);
        }
        let run = last.expect("repeats >= 3");
        resolved_n = run.diagnostics.n;
        let (amari, corr) = match truth {
            Some(truth) if truth.num_sources() == run.diagnostics.n => {
                let gain = run
                    .u
                    .matmul_transa(&run.w.matmul(&truth.mixing)?)?;
                let amari = amari_index(&gain)?;
                let corr = matched_correlation(&truth.sources, &run.sources_hat)?;
                (Some(amari), Some(corr.rs()))
            }
            _ => (None, None),
        };
        results.push(MethodBench {
            method,
            median_s: median(&wall_times_s),
            best_s: wall_times_s.iter().copied().fold(f64::INFINITY, f64::min),
            final_off: run.diagnostics.final_off,
            wall_times_s,
            amari,
            matched_corr: corr,
        });
    }
    let lags = config
        .lags
        .clone()
        .unwrap_or_else(|| default_lags(rec.samples()));
    let speedup = results[0].median_s / results[1].median_s;
    Ok(BenchReport {
        schema: "sobi-bench/1".into(),
        speedup,
        input: InputInfo {
            channels: rec.channels(),
            samples: rec.samples(),
            sample_rate_hz: rec.sample_rate_hz,
            source: source_label.to_string(),
        },
        config: ConfigInfo {
            n: Some(resolved_n),
            num_lags: lags.len(),
            lags: compact_lags(&lags),
            tol: config.tol.unwrap_or_else(|| default_tol(resolved_n)),
            max_sweeps: config.max_sweeps,
            lag_choice: match config.lag_choice {
                LagChoice::First => "first".into(),
                LagChoice::BestGap => "best-gap".into(),
            },
            whitening: match config.whitening {
                WhiteningMethod::Eigen => "eigen".into(),
                WhiteningMethod::Svd => "svd".into(),
            },
        },
        env: EnvInfo {
            host: format!("{} {}", std::env::consts::OS, std::env::consts::ARCH),
            build_profile: if cfg!(debug_assertions) {
                "debug-assertions".into()
            } else {
                "release".into()
            },
            rng: RNG_NAME.into(),
            warmup_runs: 1,
            preprocessing: "per-channel mean removal".into(),
        },
        results,
    })
}
