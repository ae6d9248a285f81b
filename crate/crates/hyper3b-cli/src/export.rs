//! Trajectory conversion and static SVG line plots.

use crate::output::{csv_text, emit, fmt_f64, to_json, usage, Format, UsageError};
use anyhow::{Context, Result};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Trajectory CSV written by `simulate`.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Column to plot against `t` as SVG.
    #[arg(long)]
    pub plot: Option<String>,
    /// Re-emit the trajectory as JSON or CSV.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path. Plots default to `<input stem>.<column>.svg`, tables to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize)]
struct PlotSummary {
    plot: String,
    column: String,
    points: usize,
    min: f64,
    max: f64,
}

fn read_table(path: &Path) -> Result<Table> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let columns: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let row = rec
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| UsageError(format!("{}: row {}: {e}", path.display(), i + 2)))?;
        rows.push(row);
    }
    Ok(Table { columns, rows })
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn file_safe(s: &str) -> String {
    let t: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    let t = t.trim_matches('_').to_string();
    if t.is_empty() {
        "column".to_string()
    } else {
        t
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 110.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

/// Axis range with a non-zero span.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 1e-9 };
        (lo - pad, hi + pad)
    }
}

/// Renders `y(x)` as a standalone SVG document.
pub fn svg_plot(title: &str, xlabel: &str, points: &[(f64, f64)]) -> String {
    let (x0, x1) = range(points.iter().map(|p| p.0));
    let (y0, y1) = range(points.iter().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        xml_escape(title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.3}" y1="{:.3}" x2="{px:.3}" y2="{:.3}" stroke="black"/><text x="{px:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="middle">{xv:.4e}</text>"#,
            TOP + ph,
            TOP + ph + 5.0,
            TOP + ph + 18.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.3}" y1="{py:.3}" x2="{LEFT:.3}" y2="{py:.3}" stroke="black"/><text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="11" text-anchor="end">{yv:.6e}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        xml_escape(xlabel)
    );
    let mut path = String::new();
    for (i, &(x, y)) in points
        .iter()
        .filter(|p| p.0.is_finite() && p.1.is_finite())
        .enumerate()
    {
        let _ = write!(
            path,
            "{}{:.3},{:.3}",
            if i == 0 { "" } else { " " },
            sx(x),
            sy(y)
        );
    }
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{path}"/>"#
    );
    s.push_str("</svg>\n");
    s
}

pub fn run(args: &Args) -> Result<u8> {
    if args.plot.is_none() && args.format.is_none() {
        return usage("export needs --plot <column> or --format json|csv");
    }
    if args.plot.is_some() && args.format.is_some() {
        return usage("--plot and --format cannot be combined");
    }
    let table = read_table(&args.input)?;
    if let Some(col) = &args.plot {
        let Some(ci) = table.columns.iter().position(|c| c == col) else {
            return usage(format!(
                "no column {col:?}; available: {}",
                table.columns.join(", ")
            ));
        };
        let ti = table.columns.iter().position(|c| c == "t").unwrap_or(0);
        let points: Vec<(f64, f64)> = table.rows.iter().map(|r| (r[ti], r[ci])).collect();
        let out = args.out.clone().unwrap_or_else(|| {
            let stem = args
                .input
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            args.input
                .with_file_name(format!("{stem}.{}.svg", file_safe(col)))
        });
        let title = format!("{col} vs {}", table.columns[ti]);
        std::fs::write(&out, svg_plot(&title, &table.columns[ti], &points))
            .with_context(|| format!("writing {}", out.display()))?;
        let (min, max) = points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
                (a.min(p.1), b.max(p.1))
            });
        emit(
            &to_json(&PlotSummary {
                plot: out.display().to_string(),
                column: col.clone(),
                points: points.len(),
                min,
                max,
            })?,
            None,
        )?;
        return Ok(0);
    }
    let text = match args.format {
        Some(Format::Json) => to_json(&table)?,
        _ => {
            let header: Vec<&str> = table.columns.iter().map(String::as_str).collect();
            csv_text(
                &header,
                table
                    .rows
                    .iter()
                    .map(|r| r.iter().map(|x| fmt_f64(*x)).collect()),
            )?
        }
    };
    emit(&text, args.out.as_deref())?;
    Ok(0)
}
