#![no_main]

use libfuzzer_sys::fuzz_target;
use minsurf::verify::export::{read_ply_points, write_points, ExportFormat};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(points) = read_ply_points(text) {
        let Some(dim) = points.first().map(Vec::len) else { return };
        let mut out = Vec::new();
        write_points(&mut out, dim, &points, ExportFormat::Ply).unwrap();
        let back = read_ply_points(std::str::from_utf8(&out).unwrap()).expect("own output parses");
        assert_eq!(back, points);
    }
});
