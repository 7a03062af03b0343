//! CSV tables and SVG line plots.

use serde::Serialize;

use crate::CliError;

/// A CSV table: header plus rows of already formatted cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma separated, LF terminated.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        let bytes = writer.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// 17 significant digits; empty for non-finite values.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        String::new()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 1e-12 * lo.abs().max(1.0) {
        let pad = 0.5 * lo.abs().max(1.0);
        return (lo - pad, hi + pad);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot<'_> {
    /// Standalone SVG document with linear axes.
    pub fn to_svg(&self) -> String {
        let points: Vec<(f64, f64)> =
            self.points.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
        let (x0, x1) = range(points.iter().map(|p| p.0));
        let (y0, y1) = range(points.iter().map(|p| p.1));
        let pw = WIDTH - LEFT - RIGHT;
        let ph = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        );
        svg.push_str(&format!("<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" style=\"fill:#ffffff\"/>\n"));
        svg.push_str(&format!(
            "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{pw}\" height=\"{ph}\" style=\"fill:none;stroke:#333333;stroke-width:1\"/>\n"
        ));
        let text_style = "font-family:sans-serif;font-size:12px;fill:#222222";
        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let x = x0 + f * (x1 - x0);
            let y = y0 + f * (y1 - y0);
            let (px, py) = (sx(x), sy(y));
            svg.push_str(&format!(
                "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" style=\"stroke:#333333\"/>\n",
                TOP + ph,
                TOP + ph + 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{px:.2}\" y=\"{:.2}\" style=\"{text_style};text-anchor:middle\">{x:.3e}</text>\n",
                TOP + ph + 20.0
            ));
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" style=\"stroke:#333333\"/>\n",
                LEFT - 5.0
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" style=\"{text_style};text-anchor:end\">{y:.4}</text>\n",
                LEFT - 8.0,
                py + 4.0
            ));
        }
        if !points.is_empty() {
            let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            svg.push_str(&format!(
                "<polyline points=\"{}\" style=\"fill:none;stroke:#1f5fa8;stroke-width:1.5\"/>\n",
                path.join(" ")
            ));
            for &(x, y) in &points {
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" style=\"fill:#1f5fa8\"/>\n",
                    sx(x),
                    sy(y)
                ));
            }
        }
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"24\" style=\"{text_style};font-size:14px;text-anchor:middle\">{}</text>\n",
            LEFT + pw / 2.0,
            escape(self.title)
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" style=\"{text_style};text-anchor:middle\">{}</text>\n",
            LEFT + pw / 2.0,
            HEIGHT - 15.0,
            escape(self.x_label)
        ));
        svg.push_str(&format!(
            "<text x=\"18\" y=\"{:.2}\" transform=\"rotate(-90 18 {:.2})\" style=\"{text_style};text-anchor:middle\">{}</text>\n",
            TOP + ph / 2.0,
            TOP + ph / 2.0,
            escape(self.y_label)
        ));
        svg.push_str("</svg>\n");
        svg
    }
}
