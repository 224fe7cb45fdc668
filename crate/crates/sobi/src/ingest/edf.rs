//! Minimal reader for plain continuous EDF files (the PhysioNet EEG
//! flavor).
//!
//! Supported: one fixed header (256 bytes), per-signal headers (256 bytes
//! each), and contiguous data records of 16-bit little-endian samples that
//! are mapped to physical units through the per-signal linear scale.
//! EDF+ annotation channels (label starting "EDF Annotations") are
//! skipped; discontinuous EDF+D files are rejected as unsupported, as is
//! anything that does not carry version "0".

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::model::Recording;

const FIXED_HEADER: usize = 256;
const PER_SIGNAL_HEADER: usize = 256;
const ANNOTATION_LABEL: &str = "EDF Annotations";

#[derive(Debug, Clone)]
pub struct EdfSignalHeader {
    pub label: String,
    pub samples_per_record: usize,
    pub physical_min: f64,
    pub physical_max: f64,
    pub digital_min: i32,
    pub digital_max: i32,
}

#[derive(Debug, Clone)]
pub struct EdfHeader {
    pub version: String,
    pub num_records: usize,
    pub record_duration_s: f64,
    pub num_signals: usize,
    pub signals: Vec<EdfSignalHeader>,
}

impl EdfSignalHeader {
    pub fn is_annotation(&self) -> bool {
        self.label.starts_with(ANNOTATION_LABEL)
    }

    fn scale(&self) -> f64 {
        (self.physical_max - self.physical_min)
            / (self.digital_max as f64 - self.digital_min as f64)
    }

    pub fn physical_value(&self, digital: i16) -> f64 {
        (digital as f64 - self.digital_min as f64) * self.scale() + self.physical_min
    }
}

fn ascii_field<'a>(bytes: &'a [u8], start: usize, len: usize, what: &str) -> Result<&'a str> {
    let slice = bytes
        .get(start..start + len)
        .ok_or_else(|| Error::EdfMalformed(format!("file too short for {what}")))?;
    std::str::from_utf8(slice)
        .map_err(|_| Error::EdfMalformed(format!("{what} is not ASCII text")))
        .map(str::trim)
}

fn num_field<T: std::str::FromStr>(bytes: &[u8], start: usize, len: usize, what: &str) -> Result<T> {
    let text = ascii_field(bytes, start, len, what)?;
    text.parse()
        .map_err(|_| Error::EdfMalformed(format!("cannot parse {what} from {text:?}")))
}

/// Parse the header, resolving an unknown record count (-1) from the
/// payload size and validating the header/payload size relationship.
pub fn read_edf_header(bytes: &[u8]) -> Result<EdfHeader> {
    let version = ascii_field(bytes, 0, 8, "version")?;
    if version != "0" {
        return Err(Error::EdfUnsupported(format!(
            "version {version:?}, only plain EDF (version 0) is supported"
        )));
    }
    let reserved = ascii_field(bytes, 192, 44, "reserved field")?;
    if reserved.starts_with("EDF+D") {
        return Err(Error::EdfUnsupported(
            "discontinuous EDF+D recordings".into(),
        ));
    }
    let header_bytes: usize = num_field(bytes, 184, 8, "header byte count")?;
    let declared_records: i64 = num_field(bytes, 236, 8, "record count")?;
    let record_duration_s: f64 = num_field(bytes, 244, 8, "record duration")?;
    let num_signals: usize = num_field(bytes, 252, 4, "signal count")?;
    if num_signals == 0 {
        return Err(Error::EdfMalformed("zero signals".into()));
    }
    if !record_duration_s.is_finite() || record_duration_s <= 0.0 {
        return Err(Error::EdfMalformed(format!(
            "record duration {record_duration_s} must be positive"
        )));
    }
    let expected_header = FIXED_HEADER + PER_SIGNAL_HEADER * num_signals;
    if header_bytes != expected_header {
        return Err(Error::EdfMalformed(format!(
            "header byte count {header_bytes} does not match {num_signals} signals (expected {expected_header})"
        )));
    }
    if bytes.len() < expected_header {
        return Err(Error::EdfMalformed(format!(
            "file shorter ({}) than its header ({expected_header})",
            bytes.len()
        )));
    }

    // Per-signal headers store each field for all signals consecutively.
    let ns = num_signals;
    let base = FIXED_HEADER;
    let mut signals = Vec::with_capacity(ns);
    for i in 0..ns {
        let label = ascii_field(bytes, base + 16 * i, 16, "signal label")?.to_string();
        let physical_min: f64 =
            num_field(bytes, base + ns * (16 + 80 + 8) + 8 * i, 8, "physical minimum")?;
        let physical_max: f64 = num_field(
            bytes,
            base + ns * (16 + 80 + 8 + 8) + 8 * i,
            8,
            "physical maximum",
        )?;
        let digital_min: i32 = num_field(
            bytes,
            base + ns * (16 + 80 + 8 + 8 + 8) + 8 * i,
            8,
            "digital minimum",
        )?;
        let digital_max: i32 = num_field(
            bytes,
            base + ns * (16 + 80 + 8 + 8 + 8 + 8) + 8 * i,
            8,
            "digital maximum",
        )?;
        let samples_per_record: usize = num_field(
            bytes,
            base + ns * (16 + 80 + 8 + 8 + 8 + 8 + 8 + 80) + 8 * i,
            8,
            "samples per record",
        )?;
        if digital_max <= digital_min {
            return Err(Error::EdfMalformed(format!(
                "signal {label:?}: digital range [{digital_min}, {digital_max}] is empty"
            )));
        }
        if physical_max == physical_min || !physical_min.is_finite() || !physical_max.is_finite() {
            return Err(Error::EdfMalformed(format!(
                "signal {label:?}: physical range [{physical_min}, {physical_max}] is degenerate"
            )));
        }
        // keep the digital-to-physical scale far away from overflow
        if physical_min.abs() > 1e12 || physical_max.abs() > 1e12 {
            return Err(Error::EdfMalformed(format!(
                "signal {label:?}: physical range [{physical_min}, {physical_max}] is implausibly large"
            )));
        }
        if samples_per_record == 0 {
            return Err(Error::EdfMalformed(format!(
                "signal {label:?}: zero samples per record"
            )));
        }
        signals.push(EdfSignalHeader {
            label,
            samples_per_record,
            physical_min,
            physical_max,
            digital_min,
            digital_max,
        });
    }

    let record_size: usize = signals.iter().map(|s| s.samples_per_record * 2).sum();
    let payload = bytes.len() - expected_header;
    let num_records = if declared_records < 0 {
        if record_size == 0 || !payload.is_multiple_of(record_size) {
            return Err(Error::PayloadSize {
                expected: expected_header + (payload / record_size.max(1)) * record_size,
                actual: bytes.len(),
            });
        }
        payload / record_size
    } else {
        let expected = (declared_records as usize).saturating_mul(record_size);
        if payload != expected {
            return Err(Error::PayloadSize {
                expected: expected_header.saturating_add(expected),
                actual: bytes.len(),
            });
        }
        declared_records as usize
    };
    if num_records == 0 {
        return Err(Error::EdfMalformed("no data records".into()));
    }

    Ok(EdfHeader {
        version: version.to_string(),
        num_records,
        record_duration_s,
        num_signals,
        signals,
    })
}

pub fn read_edf(path: &Path, channel_filter: Option<&[String]>) -> Result<Recording> {
    read_edf_bytes(&std::fs::read(path)?, channel_filter)
}

pub fn read_edf_bytes(bytes: &[u8], channel_filter: Option<&[String]>) -> Result<Recording> {
    let header = read_edf_header(bytes)?;
    let ns = header.num_signals;

    let mut retained: Vec<usize> = (0..ns)
        .filter(|&i| !header.signals[i].is_annotation())
        .collect();
    if let Some(filter) = channel_filter {
        for want in filter {
            if !header
                .signals
                .iter()
                .any(|s| !s.is_annotation() && s.label == want.trim())
            {
                return Err(Error::ChannelNotFound(want.clone()));
            }
        }
        retained.retain(|&i| filter.iter().any(|w| w.trim() == header.signals[i].label));
    }
    if retained.is_empty() {
        return Err(Error::EdfMalformed("no channels retained".into()));
    }

    let spr0 = header.signals[retained[0]].samples_per_record;
    if retained
        .iter()
        .any(|&i| header.signals[i].samples_per_record != spr0)
    {
        let rates: Vec<String> = retained
            .iter()
            .map(|&i| {
                format!(
                    "{}={} Hz",
                    header.signals[i].label,
                    header.signals[i].samples_per_record as f64 / header.record_duration_s
                )
            })
            .collect();
        return Err(Error::EdfMixedRates(rates.join(", ")));
    }
    let sample_rate = spr0 as f64 / header.record_duration_s;

    // Byte offset of each signal's chunk within one data record.
    let mut offsets = vec![0usize; ns];
    let mut acc = 0usize;
    for i in 0..ns {
        offsets[i] = acc;
        acc += header.signals[i].samples_per_record * 2;
    }
    let record_size = acc;
    let data_start = FIXED_HEADER + PER_SIGNAL_HEADER * ns;

    let total = header.num_records * spr0;
    let mut data = RealMatrix::zeros(retained.len(), total);
    for rec in 0..header.num_records {
        let rec_base = data_start + rec * record_size;
        for (row, &sig) in retained.iter().enumerate() {
            let s = &header.signals[sig];
            let chunk = &bytes[rec_base + offsets[sig]..rec_base + offsets[sig] + spr0 * 2];
            let out = &mut data.row_mut(row)[rec * spr0..(rec + 1) * spr0];
            for (dst, pair) in out.iter_mut().zip(chunk.chunks_exact(2)) {
                let d = i16::from_le_bytes([pair[0], pair[1]]);
                *dst = s.physical_value(d);
            }
        }
    }

    let labels: Vec<String> = retained
        .iter()
        .map(|&i| header.signals[i].label.clone())
        .collect();
    Recording::new(data, sample_rate, labels)
}
