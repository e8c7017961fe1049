//! Level-set point clouds as CSV or ASCII PLY, and the matching readers.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::str::FromStr;

use thiserror::Error;

use super::{project_to_level, sample_with, SampleConfig, VerifyError};
use crate::fields::ScalarField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Ply,
}

impl FromStr for ExportFormat {
    type Err = FormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "ply" => Ok(ExportFormat::Ply),
            _ => Err(FormatError::Syntax { line: 0, msg: format!("unknown format '{s}' (csv or ply)") }),
        }
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{failed} of {attempted} projections failed")]
    Projection { failed: usize, attempted: usize },
}

fn ply_property(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("x{}", i + 1),
    }
}

/// Writes points of ℝ^dim. Values use the shortest round-trip decimal form.
pub fn write_points(out: &mut impl Write, dim: usize, points: &[Vec<f64>], format: ExportFormat) -> io::Result<()> {
    let mut buf = String::new();
    match format {
        ExportFormat::Csv => {
            let header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
            writeln!(buf, "{}", header.join(",")).ok();
        }
        ExportFormat::Ply => {
            writeln!(buf, "ply\nformat ascii 1.0\nelement vertex {}", points.len()).ok();
            for i in 0..dim {
                writeln!(buf, "property double {}", ply_property(i)).ok();
            }
            writeln!(buf, "end_header").ok();
        }
    }
    let sep = if format == ExportFormat::Csv { "," } else { " " };
    for p in points {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        writeln!(buf, "{}", row.join(sep)).ok();
    }
    out.write_all(buf.as_bytes())
}

fn parse_row(line: &str, sep: impl Fn(char) -> bool, lineno: usize) -> Result<Vec<f64>, FormatError> {
    line.split(sep)
        .filter(|s| !s.is_empty())
        .map(|s| {
            let v: f64 = s
                .trim()
                .parse()
                .map_err(|_| FormatError::Syntax { line: lineno, msg: format!("not a number: '{}'", s.trim()) })?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(FormatError::Syntax { line: lineno, msg: "non-finite coordinate".into() })
            }
        })
        .collect()
}

/// Comma-separated coordinates such as `1,0.5,-2`.
pub fn parse_point(s: &str) -> Result<Vec<f64>, FormatError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(FormatError::Syntax { line: 1, msg: "empty point".into() });
    }
    let parts: Vec<&str> = s.split(',').collect();
    if parts.iter().any(|p| p.trim().is_empty()) {
        return Err(FormatError::Syntax { line: 1, msg: "empty coordinate".into() });
    }
    parse_row(s, |c| c == ',', 1)
}

pub fn read_csv_points(text: &str) -> Result<Vec<Vec<f64>>, FormatError> {
    let mut lines = text.lines().enumerate();
    let Some((_, header)) = lines.next() else {
        return Err(FormatError::Syntax { line: 1, msg: "missing header".into() });
    };
    let dim = header.split(',').count();
    for (i, name) in header.split(',').enumerate() {
        if name.trim() != format!("x{}", i + 1) {
            return Err(FormatError::Syntax { line: 1, msg: format!("bad header field '{name}'") });
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(line, |c| c == ',', i + 1)?;
        if row.len() != dim {
            return Err(FormatError::Syntax { line: i + 1, msg: format!("expected {dim} values, got {}", row.len()) });
        }
        out.push(row);
    }
    Ok(out)
}

pub fn read_ply_points(text: &str) -> Result<Vec<Vec<f64>>, FormatError> {
    let err = |line: usize, msg: &str| FormatError::Syntax { line, msg: msg.into() };
    let mut lines = text.lines().enumerate();
    if lines.next().map(|(_, l)| l.trim()) != Some("ply") {
        return Err(err(1, "missing 'ply' magic"));
    }
    if lines.next().map(|(_, l)| l.trim()) != Some("format ascii 1.0") {
        return Err(err(2, "only 'format ascii 1.0' is supported"));
    }
    let mut count = None;
    let mut dim = 0;
    loop {
        let Some((i, line)) = lines.next() else { return Err(err(0, "missing end_header")) };
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["end_header"] => break,
            ["comment", ..] => {}
            ["element", "vertex", n] if count.is_none() => {
                count = Some(n.parse::<usize>().map_err(|_| err(i + 1, "bad vertex count"))?);
            }
            ["property", "double" | "float", _] if count.is_some() => dim += 1,
            _ => return Err(err(i + 1, "unsupported header line")),
        }
    }
    let count = count.ok_or_else(|| err(0, "no vertex element"))?;
    let mut out = Vec::with_capacity(count.min(1 << 16));
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        if out.len() == count {
            return Err(err(i + 1, "more vertices than declared"));
        }
        let row = parse_row(line, char::is_whitespace, i + 1)?;
        if row.len() != dim {
            return Err(err(i + 1, "wrong number of coordinates"));
        }
        out.push(row);
    }
    if out.len() != count {
        return Err(err(0, "fewer vertices than declared"));
    }
    Ok(out)
}

/// Result of an export: the points written and how many projections failed on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct ExportSummary {
    pub points: Vec<Vec<f64>>,
    pub failed: usize,
}

/// Projects seeded samples onto `field = level` until `count` points succeed
/// and writes them. Gives up once failures outnumber successes.
pub fn export_level_points(
    field: &ScalarField,
    level: f64,
    count: usize,
    cfg: &SampleConfig,
    format: ExportFormat,
    out: &mut impl Write,
) -> Result<ExportSummary, ExportError> {
    let mut points = Vec::with_capacity(count);
    let mut failed = 0;
    let mut batch = 0u64;
    while points.len() < count {
        let need = count - points.len();
        let c = SampleConfig { seed: cfg.seed.wrapping_add(batch), count: need, ..*cfg };
        let samples = sample_with(&c, field.dim(), |x| {
            !field.is_guarded(x) && field.eval(x).is_ok_and(|j| j.grad_norm_sq().sqrt() > cfg.grad_floor)
        })?;
        for x0 in &samples.points {
            match project_to_level(field, x0, level, cfg.grad_floor) {
                Ok(x) => points.push(x),
                Err(_) => failed += 1,
            }
        }
        let attempted = points.len() + failed;
        if failed * 2 > attempted {
            return Err(ExportError::Projection { failed, attempted });
        }
        batch += 1;
    }
    write_points(out, field.dim(), &points, format)?;
    Ok(ExportSummary { points, failed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::helicoid;

    #[test]
    fn csv_round_trip() {
        let pts = vec![vec![1.0, -0.5, 1e-20], vec![0.1, 0.2, 0.30000000000000004]];
        let mut buf = Vec::new();
        write_points(&mut buf, 3, &pts, ExportFormat::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x1,x2,x3\n"));
        assert_eq!(read_csv_points(&text).unwrap(), pts);
    }

    #[test]
    fn ply_round_trip() {
        let pts = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let mut buf = Vec::new();
        write_points(&mut buf, 4, &pts, ExportFormat::Ply).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("element vertex 1\nproperty double x\nproperty double y\nproperty double z\nproperty double x4\n"));
        assert_eq!(read_ply_points(&text).unwrap(), pts);
        assert!(read_ply_points("ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\nend_header\n1\n").is_err());
    }

    #[test]
    fn point_parsing() {
        assert_eq!(parse_point("1, 0.5,-2").unwrap(), vec![1.0, 0.5, -2.0]);
        assert!(parse_point("1,,2").is_err());
        assert!(parse_point("").is_err());
        assert!(parse_point("1,nan").is_err());
        assert!(parse_point("a").is_err());
    }

    #[test]
    fn export_contract() {
        let f = helicoid();
        let cfg = SampleConfig::default().with_seed(3);
        let mut buf = Vec::new();
        let s = export_level_points(&f, 0.0, 200, &cfg, ExportFormat::Csv, &mut buf).unwrap();
        let back = read_csv_points(&String::from_utf8(buf).unwrap()).unwrap();
        assert_eq!(back.len(), 200);
        assert_eq!(back, s.points);
        for x in &back {
            assert!(f.value(x).unwrap().abs() <= 1e-10);
        }
        let mut buf = Vec::new();
        export_level_points(&f, 0.0, 0, &cfg, ExportFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x1,x2,x3\n");
    }
}
