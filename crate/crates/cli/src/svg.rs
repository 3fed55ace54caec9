//! Minimal static SVG line and scatter plots.

use std::fmt::Write;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 450.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Dashed,
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub series: Vec<Series>,
    /// Horizontal reference lines with labels.
    pub hlines: Vec<(f64, String)>,
    /// Vertical reference lines with labels.
    pub vlines: Vec<(f64, String)>,
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    log_x: bool,
}

impl Frame {
    fn tx(&self, x: f64) -> f64 {
        let (x, a, b) = if self.log_x {
            (x.log10(), self.x0.log10(), self.x1.log10())
        } else {
            (x, self.x0, self.x1)
        };
        LEFT + (x - a) / (b - a) * (WIDTH - LEFT - RIGHT)
    }

    fn ty(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if !(lo.is_finite() && hi.is_finite()) {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn render(plot: &Plot) -> String {
    let usable = |x: f64| x.is_finite() && (!plot.log_x || x > 0.0);
    let xs = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .chain(plot.vlines.iter().map(|v| v.0))
        .filter(|&x| usable(x));
    let ys = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .chain(plot.hlines.iter().map(|h| h.0))
        .filter(|y| y.is_finite());
    let (xmin, xmax) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    let (ymin, ymax) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    let (x0, x1) = if plot.log_x {
        if xmin.is_finite() && xmax > xmin {
            (xmin / 1.2, xmax * 1.2)
        } else {
            (0.1, 10.0)
        }
    } else {
        padded(xmin, xmax)
    };
    let (y0, y1) = padded(ymin, ymax);
    let f = Frame { x0, x1, y0, y1, log_x: plot.log_x };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );
    let (px0, px1, py0, py1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        s,
        r#"<rect x="{px0}" y="{py0}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        px1 - px0,
        py1 - py0
    );

    let xticks: Vec<f64> = if plot.log_x {
        let (a, b) = (x0.log10().ceil() as i32, x1.log10().floor() as i32);
        (a..=b).map(|e| 10f64.powi(e)).collect()
    } else {
        let step = nice_step(x1 - x0);
        let start = (x0 / step).ceil() as i64;
        let end = (x1 / step).floor() as i64;
        (start..=end).map(|i| i as f64 * step).collect()
    };
    for x in xticks {
        let px = f.tx(x);
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{py1}" x2="{px:.2}" y2="{:.1}" stroke="black"/>"#, py1 + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.1}" text-anchor="middle">{}</text>"#,
            py1 + 20.0,
            label(x)
        );
    }
    let step = nice_step(y1 - y0);
    for i in (y0 / step).ceil() as i64..=(y1 / step).floor() as i64 {
        let y = i as f64 * step;
        let py = f.ty(y);
        let _ = writeln!(s, r#"<line x1="{:.1}" y1="{py:.2}" x2="{px0}" y2="{py:.2}" stroke="black"/>"#, px0 - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            px0 - 8.0,
            py + 4.0,
            label(y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        (px0 + px1) / 2.0,
        HEIGHT - 15.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" text-anchor="middle" transform="rotate(-90 20 {:.1})">{}</text>"#,
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0,
        escape(&plot.y_label)
    );

    for (y, text) in &plot.hlines {
        let py = f.ty(*y);
        let _ = writeln!(
            s,
            r##"<line x1="{px0}" y1="{py:.2}" x2="{px1}" y2="{py:.2}" stroke="#888" stroke-dasharray="2 3"/>"##
        );
        let _ = writeln!(s, r##"<text x="{:.1}" y="{:.2}" text-anchor="end" fill="#555">{}</text>"##, px1 - 4.0, py - 4.0, escape(text));
    }
    for (x, text) in &plot.vlines {
        if !usable(*x) {
            continue;
        }
        let px = f.tx(*x);
        let _ = writeln!(
            s,
            r##"<line x1="{px:.2}" y1="{py0}" x2="{px:.2}" y2="{py1}" stroke="#888" stroke-dasharray="2 3"/>"##
        );
        let _ = writeln!(s, r##"<text x="{:.2}" y="{:.1}" fill="#555">{}</text>"##, px + 4.0, py0 + 14.0, escape(text));
    }

    for (i, series) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<(f64, f64)> = series
            .points
            .iter()
            .filter(|(x, y)| usable(*x) && y.is_finite())
            .map(|&(x, y)| (f.tx(x), f.ty(y)))
            .collect();
        match series.style {
            Style::Line | Style::Dashed => {
                let mut path = String::new();
                for (px, py) in &pts {
                    let _ = write!(path, "{px:.2},{py:.2} ");
                }
                let dash = if series.style == Style::Dashed {
                    r#" stroke-dasharray="6 4""#
                } else {
                    ""
                };
                let _ = writeln!(
                    s,
                    r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
                    path.trim_end()
                );
            }
            Style::Markers => {
                for (px, py) in &pts {
                    let _ = writeln!(s, r#"<circle cx="{px:.2}" cy="{py:.2}" r="3.5" fill="{color}"/>"#);
                }
            }
        }
        let ly = py0 + 16.0 + 16.0 * i as f64;
        let _ = writeln!(s, r#"<rect x="{:.1}" y="{:.1}" width="14" height="4" fill="{color}"/>"#, px0 + 10.0, ly - 6.0);
        let _ = writeln!(s, r#"<text x="{:.1}" y="{ly:.1}">{}</text>"#, px0 + 30.0, escape(&series.label));
    }
    s.push_str("</svg>\n");
    s
}
