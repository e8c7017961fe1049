#![no_main]

use libfuzzer_sys::fuzz_target;
use minsurf::verify::export::{read_csv_points, write_points, ExportFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = read_csv_points(text) {
        let Some(dim) = text.lines().next().map(|h| h.split(',').count()) else { return };
        let mut out = Vec::new();
        write_points(&mut out, dim, &points, ExportFormat::Csv).unwrap();
        let back = read_csv_points(std::str::from_utf8(&out).unwrap()).expect("own output parses");
        assert_eq!(back, points);
    }
});
