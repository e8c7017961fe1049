#![no_main]

use libfuzzer_sys::fuzz_target;
use minsurf::verify::VerificationReport;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(r) = VerificationReport::from_json(s) {
        let again = VerificationReport::from_json(&r.to_json()).expect("own output parses");
        assert_eq!(again.to_json(), r.to_json());
    }
});
