#![no_main]

use libfuzzer_sys::fuzz_target;
use minsurf::expr;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    if let Ok((ast, dim)) = expr::parse(src, None) {
        // printing must re-parse to the same tree
        let (back, _) = expr::parse(&ast.to_string(), Some(dim)).expect("display re-parses");
        assert_eq!(back, ast);
        let x = vec![0.5; dim];
        let _ = ast.jet(&x);
    }
});
