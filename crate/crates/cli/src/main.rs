//! `minsurf`: evaluate, verify and export fields given as spec strings.
//!
//! Exit codes: 0 success or passing check, 1 failing check, 2 usage, parse
//! or evaluation error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use minsurf::fields::ScalarField;
use minsurf::fieldspec::{self, SpecError};
use minsurf::operators::{OperatorValues, DEFAULT_GRAD_FLOOR};
use minsurf::verify::export::{export_level_points, parse_point, ExportFormat};
use minsurf::verify::{run_check, Check, SampleConfig, Target};
use serde_json::json;

#[derive(Parser)]
#[command(name = "minsurf", version, about = "Numerical checks for minimal hypersurfaces given by level sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the named fields with their dimension and default weight.
    List,
    /// Evaluate a field and its operators at one point.
    Eval {
        spec: String,
        /// Comma-separated coordinates.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Run a verification check on seeded random samples.
    Verify {
        spec: String,
        /// ph, eigen, twin, tm, mincurv or graph.
        #[arg(long)]
        check: String,
        /// Level set for mincurv.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        level: f64,
        /// Eigenvalue for eigen; defaults to the field's own weight.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to 1e-9, or 1e-8 for mincurv.
        #[arg(long)]
        tol: Option<f64>,
        /// Half-width of the sampling box.
        #[arg(long = "box", default_value_t = 2.0)]
        box_radius: f64,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write Newton-projected level-set points as CSV or PLY.
    Export {
        spec: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        level: f64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value = "csv")]
        format: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "box", default_value_t = 2.0)]
        box_radius: f64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Outcome {
    Ok,
    Failed,
}

fn resolve(spec: &str) -> Result<Target, String> {
    fieldspec::resolve(spec).map_err(|e: SpecError| {
        let caret = format!("{}^", " ".repeat(spec[..e.offset().min(spec.len())].chars().count()));
        format!("invalid field spec: {e}\n  {spec}\n  {caret}")
    })
}

fn fields_of(target: &Target) -> Vec<ScalarField> {
    match target.pair() {
        Some((u, v)) if !matches!(target, Target::Scalar(_)) => vec![u, v],
        _ => target.scalar().into_iter().collect(),
    }
}

fn cmd_eval(spec: &str, point: &str, as_json: bool) -> Result<Outcome, String> {
    let target = resolve(spec)?;
    let x = parse_point(point).map_err(|e| format!("invalid point: {e}"))?;
    if x.len() != target.dim() {
        return Err(format!("point has {} coordinates but {} lives in R^{}", x.len(), target.name(), target.dim()));
    }
    let mut rows = Vec::new();
    for f in fields_of(&target) {
        if f.is_guarded(&x) {
            return Err(format!("{} is singular or undefined at this point", f.name()));
        }
        let j = f.eval(&x).map_err(|e| format!("evaluation failed: {e}"))?;
        rows.push((f.name().to_string(), j.value(), j.grad().to_vec(), OperatorValues::from_jet(&j, DEFAULT_GRAD_FLOOR)));
    }
    let mut out = String::new();
    if as_json {
        let items: Vec<_> = rows
            .iter()
            .map(|(name, value, grad, ops)| {
                json!({
                    "field": name,
                    "value": value,
                    "gradient": grad,
                    "laplacian": ops.laplacian,
                    "inf_laplacian": ops.inf_laplacian,
                    "one_laplacian": ops.one_laplacian,
                    "grad_norm_sq": ops.grad_norm_sq,
                    "mean_curvature": ops.mean_curvature,
                })
            })
            .collect();
        let doc = if items.len() == 1 { items[0].clone() } else { serde_json::Value::Array(items) };
        out.push_str(&serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?);
        out.push('\n');
    } else {
        for (name, value, grad, ops) in &rows {
            let grad: Vec<String> = grad.iter().map(|g| g.to_string()).collect();
            out.push_str(&format!("field      {name}\n"));
            out.push_str(&format!("value      {value}\n"));
            out.push_str(&format!("gradient   [{}]\n", grad.join(", ")));
            out.push_str(&format!("laplacian  {}\n", ops.laplacian));
            out.push_str(&format!("inf-lap    {}\n", ops.inf_laplacian));
            out.push_str(&format!("one-lap    {}\n", ops.one_laplacian));
            out.push_str(&format!("|grad|^2   {}\n", ops.grad_norm_sq));
            match ops.mean_curvature {
                Some(h) => out.push_str(&format!("H          {h}\n")),
                None => out.push_str("H          singular\n"),
            }
        }
    }
    print!("{out}");
    Ok(Outcome::Ok)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    spec: &str,
    check: &str,
    level: f64,
    lambda: Option<f64>,
    samples: usize,
    seed: u64,
    tol: Option<f64>,
    box_radius: f64,
    out: Option<PathBuf>,
) -> Result<Outcome, String> {
    let target = resolve(spec)?;
    let check = Check::parse(check, level, lambda)
        .ok_or_else(|| format!("unknown check '{check}' (ph, eigen, twin, tm, mincurv, graph)"))?;
    if !(box_radius.is_finite() && box_radius > 0.0) {
        return Err("--box must be positive".into());
    }
    let tol = tol.unwrap_or_else(|| check.default_tol());
    let cfg = SampleConfig::default().with_seed(seed).with_count(samples).with_box(box_radius);
    let report = run_check(&target, &check, &cfg, tol).map_err(|e| e.to_string())?;
    if let Some(path) = out {
        std::fs::write(&path, report.to_json() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    }
    println!(
        "{} {} on {}: max residual {:e} (tol {:e}), mean {:e}, {} samples, {} rejected, {} projection failures",
        if report.pass { "PASS" } else { "FAIL" },
        report.check,
        report.field,
        report.max_abs_residual,
        report.tol,
        report.mean_abs_residual,
        report.n_samples,
        report.n_rejected,
        report.n_projection_failures,
    );
    if let Some(reason) = &report.reason {
        println!("reason: {reason}");
    }
    Ok(if report.pass { Outcome::Ok } else { Outcome::Failed })
}

#[allow(clippy::too_many_arguments)]
fn cmd_export(
    spec: &str,
    level: f64,
    count: usize,
    format: &str,
    seed: u64,
    box_radius: f64,
    out: Option<PathBuf>,
) -> Result<Outcome, String> {
    let target = resolve(spec)?;
    let format: ExportFormat = format.parse().map_err(|e| format!("{e}"))?;
    let field = target
        .scalar()
        .ok_or_else(|| format!("export needs a scalar or holomorphic field, got {}", target.kind()))?;
    if !(box_radius.is_finite() && box_radius > 0.0) {
        return Err("--box must be positive".into());
    }
    let cfg = SampleConfig::default().with_seed(seed).with_box(box_radius);
    let summary = match &out {
        Some(path) => {
            let file = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut w = BufWriter::new(file);
            let s = export_level_points(&field, level, count, &cfg, format, &mut w).map_err(|e| e.to_string())?;
            w.flush().map_err(|e| e.to_string())?;
            s
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            export_level_points(&field, level, count, &cfg, format, &mut w).map_err(|e| e.to_string())?
        }
    };
    eprintln!("wrote {} points ({} projections failed)", summary.points.len(), summary.failed);
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::List => {
            print!("{}", fieldspec::catalog_listing());
            Ok(Outcome::Ok)
        }
        Command::Eval { spec, point, json } => cmd_eval(&spec, &point, json),
        Command::Verify { spec, check, level, lambda, samples, seed, tol, box_radius, out } => {
            cmd_verify(&spec, &check, level, lambda, samples, seed, tol, box_radius, out)
        }
        Command::Export { spec, level, count, format, seed, box_radius, out } => {
            cmd_export(&spec, level, count, &format, seed, box_radius, out)
        }
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
