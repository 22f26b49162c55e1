//! Static SVG line plots with log axes.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const PANEL_HEIGHT: f64 = 380.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub color: &'static str,
    pub dashed: bool,
    pub points: Vec<(f64, f64)>,
}

/// Labelled dashed vertical line.
#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub x: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_y: bool,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Option<Self> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if lo > hi {
            return None;
        }
        if log {
            let (a, b) = (lo.log10().floor(), hi.log10().ceil());
            let b = if b <= a { a + 1.0 } else { b };
            Some(Self { lo: a, hi: b, log })
        } else {
            let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
            Some(Self {
                lo: lo - pad,
                hi: hi + pad,
                log,
            })
        }
    }

    fn unit(&self, v: f64) -> Option<f64> {
        let t = if self.log {
            if v <= 0.0 {
                return None;
            }
            v.log10()
        } else {
            v
        };
        t.is_finite().then(|| (t - self.lo) / (self.hi - self.lo))
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let step = ((self.hi - self.lo) / 8.0).ceil().max(1.0);
            let mut out = Vec::new();
            let mut e = self.lo;
            while e <= self.hi + 1e-9 {
                out.push((10f64.powf(e), format!("1e{}", e as i64)));
                e += step;
            }
            out
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0]
                .iter()
                .map(|k| k * mag)
                .find(|s| *s >= raw)
                .unwrap_or(10.0 * mag);
            let mut out = Vec::new();
            let mut v = (self.lo / step).ceil() * step;
            while v <= self.hi + 1e-12 {
                out.push((v, format!("{}", (v / step).round() * step)));
                v += step;
            }
            out
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn panel(s: &mut String, p: &Panel, y0: f64) {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = PANEL_HEIGHT - TOP - BOTTOM;
    let xs = || p.series.iter().flat_map(|s| s.points.iter().map(|q| q.0));
    let ys = || p.series.iter().flat_map(|s| s.points.iter().map(|q| q.1));
    let (Some(xa), Some(ya)) = (Axis::fit(xs(), true), Axis::fit(ys(), p.log_y)) else {
        return;
    };
    let px = |x: f64| xa.unit(x).map(|u| LEFT + u * plot_w);
    let py = |y: f64| ya.unit(y).map(|u| y0 + TOP + (1.0 - u) * plot_h);

    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + plot_w / 2.0,
        y0 + TOP - 14.0,
        escape(&p.title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{LEFT}" y="{}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#000"/>"##,
        y0 + TOP
    );
    for (v, label) in xa.ticks() {
        if let Some(x) = px(v) {
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ddd"/><text x="{x:.2}" y="{}" text-anchor="middle" font-size="11">{label}</text>"##,
                y0 + TOP,
                y0 + TOP + plot_h,
                y0 + TOP + plot_h + 16.0
            );
        }
    }
    for (v, label) in ya.ticks() {
        if let Some(y) = py(v) {
            let _ = writeln!(
                s,
                r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/><text x="{}" y="{:.2}" text-anchor="end" font-size="11">{label}</text>"##,
                LEFT + plot_w,
                LEFT - 6.0,
                y + 4.0
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        LEFT + plot_w / 2.0,
        y0 + PANEL_HEIGHT - 12.0,
        escape(&p.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {0})">{1}</text>"#,
        y0 + TOP + plot_h / 2.0,
        escape(&p.y_label)
    );
    for m in &p.markers {
        if let Some(x) = px(m.x) {
            if !(LEFT..=LEFT + plot_w).contains(&x) {
                continue;
            }
            let _ = writeln!(
                s,
                r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#555" stroke-dasharray="6 4"/><text x="{:.2}" y="{}" font-size="11" fill="#555">{}</text>"##,
                y0 + TOP,
                y0 + TOP + plot_h,
                x + 4.0,
                y0 + TOP + 14.0,
                escape(&m.label)
            );
        }
    }
    for (i, ser) in p.series.iter().enumerate() {
        let pts: Vec<String> = ser
            .points
            .iter()
            .filter_map(|&(x, y)| Some(format!("{:.2},{:.2}", px(x)?, py(y)?)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        let dash = if ser.dashed {
            r#" stroke-dasharray="3 3""#
        } else {
            ""
        };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.6"{dash} points="{}"/>"#,
            ser.color,
            pts.join(" ")
        );
        let ly = y0 + TOP + 12.0 + 18.0 * i as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}" font-size="12">{}</text>"#,
            lx + 22.0,
            ser.color,
            lx + 28.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
}

/// Stacks the panels vertically into one document.
pub fn render(panels: &[Panel]) -> String {
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#fff"/>"##);
    for (i, p) in panels.iter().enumerate() {
        panel(&mut s, p, PANEL_HEIGHT * i as f64);
    }
    s.push_str("</svg>\n");
    s
}
