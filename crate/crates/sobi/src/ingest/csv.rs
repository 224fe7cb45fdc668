//! CSV recordings: one sample per line, one channel per column. An
//! optional first row of non-numeric fields becomes the channel labels.

use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::model::Recording;

pub fn read_csv(path: &Path) -> Result<Recording> {
    read_csv_bytes(&std::fs::read(path)?)
}

pub fn read_csv_bytes(bytes: &[u8]) -> Result<Recording> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Csv {
        line: 0,
        message: format!("not valid UTF-8: {e}"),
    })?;
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    if lines.len() < 2 {
        return Err(Error::Csv {
            line: lines.len(),
            message: format!("need at least 2 rows, found {}", lines.len()),
        });
    }

    let first_fields: Vec<&str> = split_fields(lines[0].1);
    let header = first_fields
        .iter()
        .any(|f| f.trim().parse::<f64>().is_err());
    let (labels, data_lines) = if header {
        let labels: Vec<String> = first_fields.iter().map(|f| f.trim().to_string()).collect();
        (Some(labels), &lines[1..])
    } else {
        (None, &lines[..])
    };
    if data_lines.is_empty() {
        return Err(Error::Csv {
            line: lines[0].0,
            message: "header row with no data rows".into(),
        });
    }

    let cols = split_fields(data_lines[0].1).len();
    if let Some(labels) = &labels {
        if labels.len() != cols {
            return Err(Error::Csv {
                line: data_lines[0].0,
                message: format!("{} header fields but {} data fields", labels.len(), cols),
            });
        }
    }

    let samples = data_lines.len();
    let mut data = RealMatrix::zeros(cols, samples);
    for (t, (line_no, line)) in data_lines.iter().enumerate() {
        let fields = split_fields(line);
        if fields.len() != cols {
            return Err(Error::Csv {
                line: *line_no,
                message: format!("ragged row: {} fields, expected {cols}", fields.len()),
            });
        }
        for (ch, field) in fields.iter().enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Csv {
                line: *line_no,
                message: format!("non-numeric cell {:?} in column {}", field, ch + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    line: *line_no,
                    message: format!("non-finite cell {field:?} in column {}", ch + 1),
                });
            }
            data.set(ch, t, v);
        }
    }

    let labels =
        labels.unwrap_or_else(|| (1..=cols).map(|i| format!("ch{i}")).collect::<Vec<_>>());
    Recording::new(data, 0.0, labels)
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split(',').collect()
}

/// Serialize with 17 significant digits so values round-trip exactly.
pub fn write_csv_string(rec: &Recording) -> String {
    let mut out = String::new();
    out.push_str(&rec.labels.join(","));
    out.push('\n');
    let (m, t) = (rec.channels(), rec.samples());
    for s in 0..t {
        for ch in 0..m {
            if ch > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:.16e}", rec.data.get(ch, s)));
        }
        out.push('\n');
    }
    out
}

pub fn write_csv(rec: &Recording, path: &Path) -> Result<()> {
    std::fs::write(path, write_csv_string(rec))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labeled_two_by_two() {
        let rec = read_csv_bytes(b"a,b\n1,2\n3,4").unwrap();
        assert_eq!(rec.channels(), 2);
        assert_eq!(rec.samples(), 2);
        assert_eq!(rec.labels, vec!["a", "b"]);
        // column a holds samples (1, 3); column b holds (2, 4)
        assert_eq!(rec.data.row(0), &[1.0, 3.0]);
        assert_eq!(rec.data.row(1), &[2.0, 4.0]);
    }

    #[test]
    fn ragged_row_names_the_line() {
        let err = read_csv_bytes(b"a,b\n1,2\n3,4,5\n").unwrap_err();
        match err {
            Error::Csv { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("ragged"), "{message}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn non_numeric_cell_names_the_line() {
        let err = read_csv_bytes(b"1,2\n3,oops\n").unwrap_err();
        match err {
            Error::Csv { line, message } => {
                assert_eq!(line, 2);
                assert!(message.contains("non-numeric"), "{message}");
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn single_row_rejected() {
        assert!(read_csv_bytes(b"1,2\n").is_err());
        assert!(read_csv_bytes(b"").is_err());
    }

    #[test]
    fn round_trip_exact_at_17_digits() {
        let mut data = RealMatrix::zeros(4, 100);
        let mut state = 42_u64;
        for v in data.data_mut() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            *v = ((state >> 12) as f64 / (1u64 << 52) as f64 - 0.5) * 1e3;
        }
        let rec = Recording::with_default_labels(data, 0.0);
        let text = write_csv_string(&rec);
        let back = read_csv_bytes(text.as_bytes()).unwrap();
        assert_eq!(back.labels, rec.labels);
        for (a, b) in back.data.data().iter().zip(rec.data.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
