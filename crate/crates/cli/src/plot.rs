//! Self-contained SVG line charts from the run CSVs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::output::write_atomic;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is empty")]
    Empty { path: PathBuf },
    #[error("{path}, line {line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
}

/// A parsed CSV: header plus string cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table, PlotError> {
        let text = std::fs::read_to_string(path).map_err(|source| PlotError::Io { path: path.into(), source })?;
        Table::parse(path, &text)
    }

    pub fn parse(path: &Path, text: &str) -> Result<Table, PlotError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = match lines.next() {
            Some(h) => h.split(',').map(|s| s.trim().to_string()).collect(),
            None => return Err(PlotError::Empty { path: path.into() }),
        };
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            let row: Vec<String> = line.split(',').map(|s| s.trim().to_string()).collect();
            if row.len() != header.len() {
                return Err(PlotError::Malformed {
                    path: path.into(),
                    line: k + 2,
                    reason: format!("{} fields, header has {}", row.len(), header.len()),
                });
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(PlotError::Empty { path: path.into() });
        }
        Ok(Table { path: path.into(), header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, PlotError> {
        let idx = self.header.iter().position(|h| h == name).ok_or_else(|| PlotError::Malformed {
            path: self.path.clone(),
            line: 1,
            reason: format!("missing column `{name}`"),
        })?;
        self.rows
            .iter()
            .enumerate()
            .map(|(k, r)| {
                r[idx].parse::<f64>().map_err(|_| PlotError::Malformed {
                    path: self.path.clone(),
                    line: k + 2,
                    reason: format!("`{}` in column `{name}` is not a number", r[idx]),
                })
            })
            .collect()
    }

    pub fn text_column(&self, name: &str) -> Result<Vec<String>, PlotError> {
        let idx = self.header.iter().position(|h| h == name).ok_or_else(|| PlotError::Malformed {
            path: self.path.clone(),
            line: 1,
            reason: format!("missing column `{name}`"),
        })?;
        Ok(self.rows.iter().map(|r| r[idx].clone()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-300 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Line chart with linear axes; non-finite points are dropped.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, esc(title));
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(s, r#"<path d="M{l} {t} L{l} {b} L{r} {b}" stroke="black" fill="none"/>"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xv:.3e}</text>"#, sx(xv), b + 16.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.3e}</text>"#, l - 4.0, sy(yv) + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, esc(x_label));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        esc(y_label)
    );
    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}">{}</text>"#,
            r - 110.0,
            t + 14.0 * (k as f64 + 1.0),
            esc(&ser.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn series_from(table: &Table, x: &str, ys: &[&str]) -> Result<Vec<Series>, PlotError> {
    let xs = table.column(x)?;
    ys.iter()
        .map(|&y| {
            let vals = table.column(y)?;
            Ok(Series { name: y.to_string(), points: xs.iter().copied().zip(vals).collect() })
        })
        .collect()
}

fn charts_for(table: &Table, name: &str) -> Result<Vec<(String, String)>, PlotError> {
    let out = match name {
        "energy.csv" => vec![(
            "energy.svg".into(),
            line_chart("Modulated energy", "t", "energy", &series_from(table, "t", &["E", "E1", "E2"])?),
        )],
        "sweep.csv" => {
            let n = table.column("N")?;
            let eps = table.column("eps")?;
            let e = table.column("E_tfinal")?;
            let inv_n: Vec<(f64, f64)> = n.iter().zip(&e).map(|(&n, &e)| (1.0 / n, e)).collect();
            let by_eps: Vec<(f64, f64)> = eps.iter().copied().zip(e.iter().copied()).collect();
            vec![
                (
                    "sweep_inv_n.svg".into(),
                    line_chart("E at final time", "1/N", "E_tfinal", &[Series { name: "E_tfinal".into(), points: inv_n }]),
                ),
                (
                    "sweep_eps.svg".into(),
                    line_chart("E at final time", "eps", "E_tfinal", &[Series { name: "E_tfinal".into(), points: by_eps }]),
                ),
            ]
        }
        "quantize.csv" => vec![(
            "quantize.svg".into(),
            line_chart("Initial energy terms", "eps", "value", &series_from(table, "eps", &["kinetic", "confinement", "I", "J"])?),
        )],
        "coercivity.csv" => {
            let n = table.column("N")?;
            let lhs = table.column("median_lhs")?;
            let names = table.text_column("test_function")?;
            let mut labels: Vec<String> = names.clone();
            labels.dedup();
            let series: Vec<Series> = labels
                .iter()
                .map(|l| Series {
                    name: l.clone(),
                    points: (0..n.len()).filter(|&k| &names[k] == l).map(|k| (n[k], lhs[k])).collect(),
                })
                .collect();
            vec![("coercivity.svg".into(), line_chart("Median weak error", "N", "median LHS", &series))]
        }
        "euler.csv" => vec![(
            "euler.svg".into(),
            line_chart("Vortex-blob run", "t", "value", &series_from(table, "t", &["l1_change", "omega_max"])?),
        )],
        _ => vec![],
    };
    Ok(out)
}

fn csv_files(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), PlotError> {
    let io = |source| PlotError::Io { path: dir.into(), source };
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            csv_files(&p, out)?;
        } else if p.extension().is_some_and(|e| e == "csv") {
            out.push(p);
        }
    }
    Ok(())
}

/// Writes an SVG next to every recognized CSV under `dir`; returns the SVG paths.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>, PlotError> {
    let mut csvs = Vec::new();
    csv_files(dir, &mut csvs)?;
    let mut written = Vec::new();
    for path in csvs {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
        let table = Table::read(&path)?;
        for (svg, body) in charts_for(&table, &name)? {
            let target = path.with_file_name(svg);
            write_atomic(&target, body.as_bytes()).map_err(|source| PlotError::Io { path: target.clone(), source })?;
            written.push(target);
        }
    }
    Ok(written)
}
