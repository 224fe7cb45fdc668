//! Randomized invariants for the readers and writers, plus a
//! deterministic mutation sweep over the fuzz corpus seeds.
#![allow(clippy::needless_range_loop)]

use std::path::PathBuf;

use proptest::prelude::*;
use sobi::ingest::{
    read_bin_bytes, read_csv_bytes, read_edf_bytes, read_edf_header, sniff_format, write_bin_bytes,
    write_csv_string, Format,
};
use sobi::matrix::RealMatrix;
use sobi::model::Recording;

fn finite_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e300..1e300f64,
        -1.0..1.0f64,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

proptest! {
    #[test]
    fn bss1_round_trip_is_bit_exact(
        rows in 1usize..6,
        cols in 1usize..40,
        values in proptest::collection::vec(finite_f64(), 0..240),
    ) {
        let mut data = vec![0.0; rows * cols];
        for (d, v) in data.iter_mut().zip(values.iter().cycle().take(rows * cols)) {
            *d = *v;
        }
        let m = RealMatrix::new(rows, cols, data).unwrap();
        let bytes = write_bin_bytes(&m);
        let back = read_bin_bytes(&bytes).unwrap();
        prop_assert_eq!(back.data.rows(), rows);
        prop_assert_eq!(back.data.cols(), cols);
        for (a, b) in back.data.data().iter().zip(m.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        // and the re-encoding reproduces the byte stream
        prop_assert_eq!(write_bin_bytes(&back.data), bytes);
    }

    #[test]
    fn truncated_bss1_never_round_trips_silently(
        cut in 1usize..20,
        rows in 1usize..4,
        cols in 1usize..10,
    ) {
        let m = RealMatrix::new(rows, cols, vec![1.5; rows * cols]).unwrap();
        let bytes = write_bin_bytes(&m);
        let cut = cut.min(bytes.len() - 1);
        prop_assert!(read_bin_bytes(&bytes[..bytes.len() - cut]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact(
        rows in 1usize..5,
        cols in 2usize..30,
        values in proptest::collection::vec(-1e15..1e15f64, 0..150),
    ) {
        let mut data = vec![0.0; rows * cols];
        for (d, v) in data.iter_mut().zip(values.iter().cycle().take(rows * cols)) {
            *d = *v;
        }
        let rec = Recording::with_default_labels(RealMatrix::new(rows, cols, data).unwrap(), 0.0);
        let text = write_csv_string(&rec);
        let back = read_csv_bytes(text.as_bytes()).unwrap();
        prop_assert_eq!(back.labels, rec.labels);
        for (a, b) in back.data.data().iter().zip(rec.data.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn csv_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..600)) {
        let _ = read_csv_bytes(&bytes);
    }

    #[test]
    fn bin_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..600)) {
        let _ = read_bin_bytes(&bytes);
    }

    #[test]
    fn edf_parser_never_panics(bytes in proptest::collection::vec(any::<u8>(), 0..2048)) {
        let _ = read_edf_header(&bytes);
        let _ = read_edf_bytes(&bytes, None);
    }
}

/// Deterministic mutation sweep over the checked-in fuzz corpus: every
/// seed parses, and single-byte corruptions never panic the parsers.
#[test]
fn corpus_seeds_parse_and_survive_mutation() {
    type ParseOk = fn(&[u8]) -> bool;
    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus");
    let cases: [(&str, ParseOk); 3] = [
        ("read_csv", |b| read_csv_bytes(b).is_ok()),
        ("read_bin", |b| read_bin_bytes(b).is_ok()),
        ("read_edf", |b| read_edf_bytes(b, None).is_ok()),
    ];
    for (dir, parse_ok) in cases {
        let dir_path = corpus.join(dir);
        let mut found = 0;
        for entry in std::fs::read_dir(&dir_path).unwrap() {
            let path = entry.unwrap().path();
            let bytes = std::fs::read(&path).unwrap();
            found += 1;
            assert!(parse_ok(&bytes), "corpus seed {} must parse", path.display());
            // flip one byte at a spread of positions; parsers may reject
            // but must not panic
            let step = (bytes.len() / 64).max(1);
            for pos in (0..bytes.len()).step_by(step) {
                let mut mutated = bytes.clone();
                mutated[pos] ^= 0xff;
                let _ = parse_ok(&mutated);
                let mut truncated = bytes.clone();
                truncated.truncate(pos);
                let _ = parse_ok(&truncated);
            }
        }
        assert!(found > 0, "no corpus seeds in {}", dir_path.display());
    }
}

#[test]
fn sniffing_matches_writers() {
    let m = RealMatrix::new(1, 2, vec![1.0, 2.0]).unwrap();
    let bin = write_bin_bytes(&m);
    assert_eq!(sniff_format(&bin, None), Format::Bss1);
    let rec = Recording::with_default_labels(m, 0.0);
    let csv = write_csv_string(&rec);
    assert_eq!(sniff_format(csv.as_bytes(), None), Format::Csv);
    let golden = std::fs::read(
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden_ramp.edf"),
    )
    .unwrap();
    assert_eq!(sniff_format(&golden, None), Format::Edf);
}
