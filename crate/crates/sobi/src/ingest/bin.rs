//! "BSS1" binary matrix container.
//!
//! Layout, all multi-byte values little-endian:
//!   bytes 0..4   magic "BSS1"
//!   bytes 4..8   u32 rows
//!   bytes 8..12  u32 cols
//!   then rows*cols f64 values, row-major.
//!
//! Round-trips are bit-exact for finite matrices.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::model::Recording;

const MAGIC: &[u8; 4] = b"BSS1";
const HEADER_LEN: usize = 12;

pub fn read_bin(path: &Path) -> Result<Recording> {
    read_bin_bytes(&std::fs::read(path)?)
}

pub fn read_bin_bytes(bytes: &[u8]) -> Result<Recording> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::PayloadSize {
            expected: HEADER_LEN,
            actual: bytes.len(),
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic {
            found: [bytes[0], bytes[1], bytes[2], bytes[3]],
        });
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidShape {
            rows,
            cols,
            len: 0,
        });
    }
    let expected = HEADER_LEN + rows.saturating_mul(cols).saturating_mul(8);
    if bytes.len() != expected {
        return Err(Error::PayloadSize {
            expected,
            actual: bytes.len(),
        });
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, chunk) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::NonFinite { index: i });
        }
        data.push(v);
    }
    let matrix = RealMatrix::new(rows, cols, data)?;
    Ok(Recording::with_default_labels(matrix, 0.0))
}

pub fn write_bin_bytes(matrix: &RealMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + matrix.data().len() * 8);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(matrix.rows() as u32).to_le_bytes());
    out.extend_from_slice(&(matrix.cols() as u32).to_le_bytes());
    for v in matrix.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_bin(matrix: &RealMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, write_bin_bytes(matrix))?;
    Ok(())
}
