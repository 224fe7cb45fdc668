#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = sobi::ingest::read_edf_header(data);
    if let Ok(rec) = sobi::ingest::read_edf_bytes(data, None) {
        assert_eq!(rec.labels.len(), rec.channels());
        assert!(rec.sample_rate_hz > 0.0);
        assert!(rec.data.data().iter().all(|v| v.is_finite()));
    }
});
