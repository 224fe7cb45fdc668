//! Recording readers and writers.
//!
//! Three formats are supported:
//! - CSV, samples as rows and channels as columns (recorded exports are
//!   long and thin; note the in-memory layout is channels x samples);
//! - "BSS1", a little-endian binary matrix container;
//! - a minimal subset of EDF for PhysioNet-style EEG files.

mod bin;
mod csv;
mod edf;

pub use bin::{read_bin, read_bin_bytes, write_bin, write_bin_bytes};
pub use csv::{read_csv, read_csv_bytes, write_csv, write_csv_string};
pub use edf::{read_edf, read_edf_bytes, read_edf_header, EdfHeader, EdfSignalHeader};

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Recording;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Bss1,
    Edf,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "bss1" | "bin" => Ok(Format::Bss1),
            "edf" => Ok(Format::Edf),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

/// Guess the format from magic bytes first ("BSS1", or the EDF version
/// field "0" padded to 8 bytes), then from the file extension.
pub fn sniff_format(bytes: &[u8], path: Option<&Path>) -> Format {
    if bytes.starts_with(b"BSS1") {
        return Format::Bss1;
    }
    if bytes.len() >= 8 && &bytes[..8] == b"0       " {
        return Format::Edf;
    }
    if let Some(ext) = path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        match ext.to_ascii_lowercase().as_str() {
            "bss1" | "bin" => return Format::Bss1,
            "edf" => return Format::Edf,
            _ => {}
        }
    }
    Format::Csv
}

/// Read a recording, sniffing the format unless one is forced.
pub fn read_recording(path: &Path, format: Option<Format>) -> Result<Recording> {
    let bytes = std::fs::read(path)?;
    let format = format.unwrap_or_else(|| sniff_format(&bytes, Some(path)));
    match format {
        Format::Csv => read_csv_bytes(&bytes),
        Format::Bss1 => read_bin_bytes(&bytes),
        Format::Edf => read_edf_bytes(&bytes, None),
    }
}
