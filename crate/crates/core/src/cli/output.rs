//! Run artifacts: CSV tables, SVG line plots and the assertion log.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Everything a subcommand produced.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    /// Informational text printed before the assertions.
    pub text: Vec<String>,
    pub assertions: Vec<Assertion>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.assertions.push(Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn info(&mut self, line: impl Into<String>) {
        self.text.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }
}

/// RFC 4180: header row, CRLF line ends, quoting only where needed.
pub fn write_csv<S: AsRef<str>>(path: &Path, header: &[&str], rows: &[Vec<S>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(AsRef::as_ref))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// One polyline per series, with axes and end labels; 800×600 viewport.
pub struct Plot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub series: Vec<(&'a str, Vec<(f64, f64)>)>,
}

const W: f64 = 800.0;
const H: f64 = 600.0;
const MARGIN: f64 = 70.0;

fn scaled(v: f64, s: Scale) -> Option<f64> {
    match s {
        Scale::Linear => v.is_finite().then_some(v),
        Scale::Log => (v > 0.0 && v.is_finite()).then(|| v.log10()),
    }
}

fn range(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn label(v: f64, s: Scale) -> String {
    match s {
        Scale::Linear => format!("{v:.3}"),
        Scale::Log => format!("1e{v:.2}"),
    }
}

impl Plot<'_> {
    pub fn render(&self) -> String {
        let pts: Vec<Vec<(f64, f64)>> = self
            .series
            .iter()
            .map(|(_, s)| {
                s.iter()
                    .filter_map(|&(x, y)| Some((scaled(x, self.x_scale)?, scaled(y, self.y_scale)?)))
                    .collect()
            })
            .collect();
        let (x0, x1) = range(pts.iter().flatten().map(|p| p.0));
        let (y0, y1) = range(pts.iter().flatten().map(|p| p.1));
        let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
        let py = |y: f64| H - MARGIN - (y - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"#
        );
        let _ = writeln!(s, r#"<rect width="800" height="600" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="400" y="30" text-anchor="middle" font-size="18">{}</text>"#,
            self.title
        );
        let (bx, by) = (MARGIN, H - MARGIN);
        let _ = writeln!(
            s,
            r#"<path d="M{bx} {} L{bx} {by} L{} {by}" stroke="black" fill="none"/>"#,
            MARGIN,
            W - MARGIN
        );
        let _ = writeln!(
            s,
            r#"<text x="400" y="580" text-anchor="middle" font-size="14">{}</text>"#,
            self.x_label
        );
        let _ = writeln!(
            s,
            r#"<text x="20" y="300" text-anchor="middle" font-size="14" transform="rotate(-90 20 300)">{}</text>"#,
            self.y_label
        );
        for (v, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}" font-size="12">{}</text>"#,
                px(v),
                by + 18.0,
                label(v, self.x_scale)
            );
        }
        for v in [y0, y1] {
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="12">{}</text>"#,
                bx - 6.0,
                py(v) + 4.0,
                label(v, self.y_scale)
            );
        }
        let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
        for (i, ((name, _), p)) in self.series.iter().zip(&pts).enumerate() {
            let c = colors[i % colors.len()];
            let d: Vec<String> = p.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" stroke="{c}" fill="none" stroke-width="2"/>"#,
                d.join(" ")
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-size="12" fill="{c}">{name}</text>"#,
                W - MARGIN - 150.0,
                MARGIN + 16.0 * (i as f64 + 1.0)
            );
        }
        s.push_str("</svg>\n");
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_crlf() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, &["a", "b"], &[vec!["1".to_string(), "x,y".to_string()]]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a,b\r\n1,\"x,y\"\r\n");
    }

    #[test]
    fn svg_viewport() {
        let plot = Plot {
            title: "t",
            x_label: "x",
            y_label: "y",
            x_scale: Scale::Log,
            y_scale: Scale::Linear,
            series: vec![("s", vec![(1.0, 2.0), (10.0, 3.0), (-1.0, 0.0)])],
        };
        let svg = plot.render();
        assert!(svg.starts_with("<svg") && svg.contains(r#"viewBox="0 0 800 600""#));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
