//! Minimal SVG line and marker plots with linear axes.

use std::fmt::Write;

const PANEL_W: f64 = 560.0;
const PANEL_H: f64 = 420.0;
const MARGIN_L: f64 = 78.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Line,
    Markers,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

impl Series {
    pub fn line(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: Style::Line }
    }

    pub fn markers(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self { label: label.into(), points, style: Style::Markers }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: Vec::new() }
    }

    pub fn with(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let m = raw / mag;
    mag * if m < 1.5 {
        1.0
    } else if m < 3.5 {
        2.0
    } else if m < 7.5 {
        5.0
    } else {
        10.0
    }
}

/// Range padded to whole ticks; degenerate spans are widened.
fn axis(lo: f64, hi: f64) -> (f64, f64, f64) {
    let (lo, hi) = if hi - lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.1 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        (lo, hi)
    };
    let step = nice_step(hi - lo);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

fn tick_label(v: f64, step: f64) -> String {
    let v = if v.abs() < step * 1e-9 { 0.0 } else { v };
    if (1e-3..1e5).contains(&step) && v.abs() < 1e6 {
        let decimals = (-step.log10().floor()).max(0.0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.1e}")
    }
}

fn render_panel(out: &mut String, panel: &Panel, ox: f64) {
    let finite = |&&(x, y): &&(f64, f64)| x.is_finite() && y.is_finite();
    let all: Vec<(f64, f64)> = panel.series.iter().flat_map(|s| s.points.iter().filter(finite).copied()).collect();
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        all.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
    };
    let (xlo, xhi) = if all.is_empty() { (0.0, 1.0) } else { bounds(|p| p.0) };
    let (ylo, yhi) = if all.is_empty() { (0.0, 1.0) } else { bounds(|p| p.1) };
    let (x0, x1, xs) = axis(xlo, xhi);
    let (y0, y1, ys) = axis(ylo, yhi);
    let (pl, pr) = (ox + MARGIN_L, ox + PANEL_W - MARGIN_R);
    let (pt, pb) = (MARGIN_T, PANEL_H - MARGIN_B);
    let sx = |x: f64| pl + (x - x0) / (x1 - x0) * (pr - pl);
    let sy = |y: f64| pb - (y - y0) / (y1 - y0) * (pb - pt);

    let _ = writeln!(out, r#"<g class="panel">"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
        (pl + pr) / 2.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r##"<rect x="{pl:.2}" y="{pt:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#000"/>"##,
        pr - pl,
        pb - pt
    );
    let nx = ((x1 - x0) / xs).round() as i64;
    for i in 0..=nx {
        let v = x0 + i as f64 * xs;
        let px = sx(v);
        let _ = writeln!(out, r##"<line x1="{px:.2}" y1="{pb:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/>"##, pb + 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"#,
            pb + 18.0,
            tick_label(v, xs)
        );
    }
    let ny = ((y1 - y0) / ys).round() as i64;
    for i in 0..=ny {
        let v = y0 + i as f64 * ys;
        let py = sy(v);
        let _ = writeln!(out, r##"<line x1="{:.2}" y1="{py:.2}" x2="{pl:.2}" y2="{py:.2}" stroke="#000"/>"##, pl - 5.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"#,
            pl - 8.0,
            py + 4.0,
            tick_label(v, ys)
        );
    }
    if x0 < 0.0 && x1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.2}" y1="{pt:.2}" x2="{0:.2}" y2="{pb:.2}" stroke="#bbb" stroke-dasharray="3,3"/>"##,
            sx(0.0)
        );
    }
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            out,
            r##"<line x1="{pl:.2}" y1="{0:.2}" x2="{pr:.2}" y2="{0:.2}" stroke="#bbb" stroke-dasharray="3,3"/>"##,
            sy(0.0)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        (pl + pr) / 2.0,
        PANEL_H - 12.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate({:.2},{:.2}) rotate(-90)" text-anchor="middle" font-size="13">{}</text>"#,
        ox + 18.0,
        (pt + pb) / 2.0,
        escape(&panel.y_label)
    );

    for (i, s) in panel.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        match s.style {
            Style::Line => {
                // non-finite points split the curve
                for run in s.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
                    if run.len() < 2 {
                        continue;
                    }
                    let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                    let _ = writeln!(
                        out,
                        r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                        pts.join(" ")
                    );
                }
            }
            Style::Markers => {
                for &(x, y) in s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
                    let _ = writeln!(
                        out,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}" stroke="none"/>"#,
                        sx(x),
                        sy(y)
                    );
                }
            }
        }
        let ly = pt + 16.0 + 16.0 * i as f64;
        let lx = pr - 150.0;
        match s.style {
            Style::Line => {
                let _ = writeln!(
                    out,
                    r#"<line x1="{lx:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="{color}" stroke-width="2"/>"#,
                    ly - 4.0,
                    lx + 18.0
                );
            }
            Style::Markers => {
                let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#, lx + 9.0, ly - 4.0);
            }
        }
        let _ = writeln!(out, r#"<text x="{:.2}" y="{ly:.2}" font-size="11">{}</text>"#, lx + 24.0, escape(&s.label));
    }
    let _ = writeln!(out, "</g>");
}

/// Lays the panels out side by side.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_W * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_H:.0}" viewBox="0 0 {width:.0} {PANEL_H:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut out, p, PANEL_W * i as f64);
    }
    out.push_str("</svg>\n");
    out
}
