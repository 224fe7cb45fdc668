#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(rec) = sobi::ingest::read_bin_bytes(data) {
        // anything that decodes must re-encode to the identical bytes
        let encoded = sobi::ingest::write_bin_bytes(&rec.data);
        assert_eq!(encoded, data);
    }
});
