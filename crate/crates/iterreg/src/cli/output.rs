//! Reproducible CSV and minimal SVG emission.
//!
//! All floating-point values are printed with 17 significant digits in
//! scientific notation with a `.` decimal separator, lines end with LF, and
//! there is a single header row, so identical inputs give byte-identical
//! files on every platform.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    buffer: String,
    columns: usize,
}

impl CsvWriter {
    pub fn new(header: &[&str]) -> Self {
        let mut buffer = header.join(",");
        buffer.push('\n');
        Self { buffer, columns: header.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.buffer.push_str(&fields.join(","));
        self.buffer.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buffer
    }

    pub fn write_to(self, path: &Path) -> Result<()> {
        write_text(path, &self.buffer)
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display()))))?;
    file.write_all(content.as_bytes())?;
    Ok(())
}

/// One plotted series: a label and `(x, y)` points with positive coordinates
/// (both axes are log10), plus an optional marker index.
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub marker: Option<usize>,
}

const SVG_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Minimal static log-log line chart in an 800x600 viewbox. A convenience
/// for eyeballing curves; not part of any acceptance contract.
pub fn svg_loglog_chart(series: &[Series], x_label: &str, y_label: &str) -> String {
    let (width, height) = (800.0, 600.0);
    let (left, right, top, bottom) = (70.0, 20.0, 20.0, 50.0);
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in &s.points {
            if x > 0.0 && y > 0.0 {
                x_min = x_min.min(x.log10());
                x_max = x_max.max(x.log10());
                y_min = y_min.min(y.log10());
                y_max = y_max.max(y.log10());
            }
        }
    }
    if !x_min.is_finite() || !y_min.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
        y_min = 0.0;
        y_max = 1.0;
    }
    if (x_max - x_min).abs() < 1e-12 {
        x_max = x_min + 1.0;
    }
    if (y_max - y_min).abs() < 1e-12 {
        y_max = y_min + 1.0;
    }
    let sx = |x: f64| left + (x.log10() - x_min) / (x_max - x_min) * (width - left - right);
    let sy = |y: f64| height - bottom - (y.log10() - y_min) / (y_max - y_min) * (height - top - bottom);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        height - bottom,
        width - right,
        height - bottom
    ));
    svg.push_str(&format!(
        "<line x1=\"{left}\" y1=\"{top}\" x2=\"{left}\" y2=\"{}\" stroke=\"black\"/>\n",
        height - bottom
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\">{x_label} (log10)</text>\n",
        (left + width - right) / 2.0,
        height - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{y_label} (log10)</text>\n",
        (top + height - bottom) / 2.0,
        (top + height - bottom) / 2.0
    ));
    for (i, s) in series.iter().enumerate() {
        let color = SVG_COLORS[i % SVG_COLORS.len()];
        let mut path = String::new();
        for &(x, y) in &s.points {
            if x > 0.0 && y > 0.0 {
                path.push_str(&format!("{:.2},{:.2} ", sx(x), sy(y)));
            }
        }
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.trim_end()
        ));
        if let Some(idx) = s.marker {
            if let Some(&(x, y)) = s.points.get(idx) {
                if x > 0.0 && y > 0.0 {
                    svg.push_str(&format!(
                        "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"black\"/>\n",
                        sx(x),
                        sy(y)
                    ));
                }
            }
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"13\" fill=\"{color}\">{}</text>\n",
            width - right - 130.0,
            top + 18.0 * (i as f64 + 1.0),
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
