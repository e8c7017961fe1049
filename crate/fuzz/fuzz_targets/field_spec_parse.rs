#![no_main]

use libfuzzer_sys::fuzz_target;
use minsurf::fieldspec;

fuzz_target!(|data: &[u8]| {
    if data.len() > 4096 {
        return;
    }
    let Ok(src) = std::str::from_utf8(data) else { return };
    match fieldspec::parse_spec(src) {
        Ok(node) => {
            let again = fieldspec::parse_spec(&node.to_string()).expect("display re-parses");
            assert_eq!(again.to_string(), node.to_string());
        }
        Err(e) => assert!(e.offset() <= src.len()),
    }
});
