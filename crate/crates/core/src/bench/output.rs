//! CSV and SVG writers for study artifacts.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

/// Fixed float formatting so that outputs are byte-stable.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.12e}")
}

/// CSV writer whose first line is `# config_hash=<hash> seed=<seed>`.
pub struct CsvOut<W: Write> {
    inner: csv::Writer<W>,
}

impl CsvOut<BufWriter<File>> {
    pub fn create(path: &Path, config_hash: &str, seed: u64, header: &[&str]) -> Result<Self> {
        Self::new(BufWriter::new(File::create(path)?), config_hash, seed, header)
    }
}

impl<W: Write> CsvOut<W> {
    pub fn new(mut sink: W, config_hash: &str, seed: u64, header: &[&str]) -> Result<Self> {
        writeln!(sink, "# config_hash={config_hash} seed={seed}")?;
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
        inner.write_record(header)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        Ok(self.inner.into_inner().map_err(|e| e.into_error())?)
    }
}

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Minimal line plot. With `log_axes` both axes are log10-scaled and
/// non-positive points are dropped.
pub fn svg_line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log_axes: bool) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let tx = |v: f64| if log_axes { v.log10() } else { v };
    let pts: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .filter(|(x, y)| !log_axes || (*x > 0.0 && *y > 0.0))
                .map(|&(x, y)| (tx(x), tx(y)))
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .collect()
        })
        .collect();
    let all = pts.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| m + (x - x0) / (x1 - x0) * (w - 2.0 * m);
    let py = |y: f64| h - m - (y - y0) / (y1 - y0) * (h - 2.0 * m);
    let axis = if log_axes { " (log10)" } else { "" };

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        out,
        r#"<line x1="{m}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{m}" y1="{m}" x2="{m}" y2="{b}" stroke="black"/>"#,
        b = h - m,
        r = w - m
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}{axis}</text>"#, w / 2.0, h - 15.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}{axis}</text>"#,
        h / 2.0,
        h / 2.0,
        escape(y_label)
    );
    for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
        let _ = writeln!(out, r#"<text x="{anchor_x:.1}" y="{}" text-anchor="middle">{v:.3}</text>"#, h - m + 16.0);
    }
    for v in [y0, y1] {
        let _ = writeln!(out, r#"<text x="{}" y="{:.1}" text-anchor="end">{v:.3}</text>"#, m - 6.0, py(v) + 4.0);
    }
    for (k, (s, p)) in series.iter().zip(&pts).enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(out, r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#, coords.join(" "));
        for &(x, y) in p {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, px(x), py(y));
        }
        let ly = m + 16.0 * k as f64;
        let _ = writeln!(out, r#"<text x="{}" y="{ly}" fill="{colour}" text-anchor="end">{}</text>"#, w - m, escape(s.name));
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
