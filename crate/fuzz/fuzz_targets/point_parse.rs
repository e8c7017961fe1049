#![no_main]

use libfuzzer_sys::fuzz_target;
use minsurf::verify::export::parse_point;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(p) = parse_point(s) {
        assert!(!p.is_empty());
        assert!(p.iter().all(|v| v.is_finite()));
    }
});
