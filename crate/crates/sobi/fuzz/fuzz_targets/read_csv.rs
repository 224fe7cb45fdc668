#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // The parser must never panic; on success the recording invariants
    // must hold.
    if let Ok(rec) = sobi::ingest::read_csv_bytes(data) {
        assert_eq!(rec.labels.len(), rec.channels());
        assert!(rec.channels() >= 1 && rec.samples() >= 1);
        assert!(rec.data.data().iter().all(|v| v.is_finite()));
    }
});
