use thiserror::Error;

/// Errors produced by every stage of the separation pipeline and the file
/// readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix shape: {rows}x{cols} with {len} data values")]
    InvalidShape { rows: usize, cols: usize, len: usize },

    #[error("dimension mismatch in {context}: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        context: &'static str,
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max |M - M^T| entry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("non-finite value at data index {index}")]
    NonFinite { index: usize },

    #[error("invalid source specification: {0}")]
    InvalidSourceSpec(String),

    #[error("lag {lag} out of range for {samples} samples (need lag < samples/2)")]
    LagOutOfRange { lag: usize, samples: usize },

    #[error("invalid lag set: {0}")]
    InvalidLags(String),

    #[error("recording has {samples} samples for {channels} channels; need samples > channels")]
    TooFewSamples { channels: usize, samples: usize },

    #[error("degenerate signal subspace: eigenvalue {index} minus noise variance is {value:e}")]
    DegenerateSignalSubspace { index: usize, value: f64 },

    #[error("QR iteration did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("quasi-triangular 2x2 block at row {row} (complex eigenvalue pair); only real spectra are supported")]
    QuasiTriangularBlock { row: usize },

    #[error(
        "degenerate spectrum: eigenvalues {i} and {j} differ by {gap:e} (tolerance {gap_tol:e}){hint}",
        hint = degenerate_hint(.suggest_best_gap)
    )]
    DegenerateSpectrum {
        i: usize,
        j: usize,
        gap: f64,
        gap_tol: f64,
        suggest_best_gap: bool,
    },

    #[error("row {row} has zero variance")]
    ZeroVarianceRow { row: usize },

    #[error("gain matrix has an all-zero {what} at index {index}")]
    ZeroGainLine { what: &'static str, index: usize },

    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("bad magic bytes {found:?}, expected \"BSS1\"")]
    BadMagic { found: [u8; 4] },

    #[error("payload size mismatch: expected {expected} bytes, found {actual}")]
    PayloadSize { expected: usize, actual: usize },

    #[error("malformed EDF file: {0}")]
    EdfMalformed(String),

    #[error("unsupported EDF feature: {0}")]
    EdfUnsupported(String),

    #[error("mixed sampling rates among retained EDF channels: {0}")]
    EdfMixedRates(String),

    #[error("channel {0:?} not present in the file")]
    ChannelNotFound(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{method} separation failed: {source}")]
    MethodFailed {
        method: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("report parse error: {0}")]
    ReportParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn degenerate_hint(suggest_best_gap: &bool) -> &'static str {
    if *suggest_best_gap {
        "; try the best-gap lag choice"
    } else {
        ""
    }
}

pub type Result<T> = std::result::Result<T, Error>;

