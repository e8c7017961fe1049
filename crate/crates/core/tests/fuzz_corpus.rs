//! Replays the checked-in fuzz corpus through the properties the fuzz
//! targets assert, so the seeds stay meaningful on a stable toolchain.

use std::fs;
use std::path::PathBuf;

use minsurf::expr;
use minsurf::fieldspec;
use minsurf::verify::export::{parse_point, read_csv_points, read_ply_points, write_points, ExportFormat};
use minsurf::verify::VerificationReport;

fn corpus(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus {}", dir.display());
    files.into_iter().map(|p| fs::read_to_string(p).unwrap()).collect()
}

#[test]
fn expr_parse_seeds() {
    let mut accepted = 0;
    for src in corpus("expr_parse") {
        if let Ok((ast, dim)) = expr::parse(&src, None) {
            accepted += 1;
            let (back, _) = expr::parse(&ast.to_string(), Some(dim)).unwrap();
            assert_eq!(back, ast);
        }
    }
    assert!(accepted > 0);
}

#[test]
fn field_spec_seeds() {
    let mut accepted = 0;
    for src in corpus("field_spec_parse") {
        match fieldspec::parse_spec(&src) {
            Ok(node) => {
                accepted += 1;
                let again = fieldspec::parse_spec(&node.to_string()).unwrap();
                assert_eq!(again.to_string(), node.to_string());
            }
            Err(e) => assert!(e.offset() <= src.len()),
        }
    }
    assert!(accepted > 0);
}

#[test]
fn point_seeds() {
    for s in corpus("point_parse") {
        if let Ok(p) = parse_point(&s) {
            assert!(!p.is_empty() && p.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn report_seeds() {
    let mut accepted = 0;
    for s in corpus("report_json") {
        if let Ok(r) = VerificationReport::from_json(&s) {
            accepted += 1;
            let again = VerificationReport::from_json(&r.to_json()).unwrap();
            assert_eq!(again.to_json(), r.to_json());
        }
    }
    assert!(accepted >= 3);
}

#[test]
fn csv_seeds() {
    for text in corpus("csv_points") {
        if let Ok(points) = read_csv_points(&text) {
            let dim = text.lines().next().unwrap().split(',').count();
            let mut out = Vec::new();
            write_points(&mut out, dim, &points, ExportFormat::Csv).unwrap();
            assert_eq!(read_csv_points(std::str::from_utf8(&out).unwrap()).unwrap(), points);
        }
    }
}

#[test]
fn ply_seeds() {
    for text in corpus("ply_points") {
        if let Ok(points) = read_ply_points(&text) {
            let Some(dim) = points.first().map(Vec::len) else { continue };
            let mut out = Vec::new();
            write_points(&mut out, dim, &points, ExportFormat::Ply).unwrap();
            assert_eq!(read_ply_points(std::str::from_utf8(&out).unwrap()).unwrap(), points);
        }
    }
}
