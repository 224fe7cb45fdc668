//! Blind source separation from second-order statistics.
//!
//! The library separates multichannel recordings by whitening the zero-lag
//! covariance and then finding one orthogonal transform that jointly
//! diagonalizes a set of lagged covariance matrices. Two routes to that
//! transform are implemented and benchmarked head to head:
//!
//! - [`jointdiag::givens`]: the classical cyclic Givens-rotation sweeps
//!   minimizing the total off-diagonal mass of the whole set;
//! - [`jointdiag::schur`]: a single real Schur decomposition of the first
//!   lagged covariance followed by a triangular eigensolve, `U = Q V`.
//!
//! [`evaluate::separate`] runs the full pipeline, [`evaluate::bench`]
//! times both routes on identical configurations, and [`ingest`] reads
//! recordings from CSV, the "BSS1" binary container, or EDF files.
//!
//! ```no_run
//! use sobi::evaluate::{separate, Method, SeparationConfig};
//! use sobi::ingest::read_csv;
//!
//! # fn main() -> Result<(), sobi::Error> {
//! let rec = read_csv(std::path::Path::new("recording.csv"))?;
//! let result = separate(&rec, Method::Schur, &SeparationConfig::default())?;
//! println!("{} sources in {:?}", result.diagnostics.n, result.wall_time);
//! # Ok(())
//! # }
//! ```

// index loops read naturally in dense matrix math
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod evaluate;
pub mod ingest;
pub mod jointdiag;
pub mod linalg;
pub mod matrix;
pub mod model;
pub mod whitening;

pub use error::{Error, Result};
pub use matrix::RealMatrix;
pub use model::{GroundTruth, Recording, SourceKind, SourceSpec};
