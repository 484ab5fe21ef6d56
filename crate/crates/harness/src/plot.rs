//! Self-contained SVG line plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    /// `(x, y)` points, drawn in order.
    pub points: Vec<(f64, f64)>,
    /// Optional `(lo, hi)` band per point.
    pub band: Option<Vec<(f64, f64)>>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
            band: None,
        }
    }

    pub fn with_band(mut self, band: Vec<(f64, f64)>) -> Self {
        self.band = Some(band);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    pub series: Vec<Series>,
}

impl Plot {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            log_x: false,
            log_y: false,
            series: Vec::new(),
        }
    }

    pub fn log_log(mut self) -> Self {
        self.log_x = true;
        self.log_y = true;
        self
    }

    pub fn log_y(mut self) -> Self {
        self.log_y = true;
        self
    }

    pub fn add(mut self, s: Series) -> Self {
        self.series.push(s);
        self
    }

    fn tx(&self, x: f64) -> Option<f64> {
        let v = if self.log_x { x.log10() } else { x };
        v.is_finite().then_some(v)
    }

    fn ty(&self, y: f64) -> Option<f64> {
        let v = if self.log_y { y.log10() } else { y };
        v.is_finite().then_some(v)
    }

    fn ranges(&self) -> ((f64, f64), (f64, f64)) {
        let mut xr = (f64::INFINITY, f64::NEG_INFINITY);
        let mut yr = (f64::INFINITY, f64::NEG_INFINITY);
        let grow = |r: &mut (f64, f64), v: Option<f64>| {
            if let Some(v) = v {
                r.0 = r.0.min(v);
                r.1 = r.1.max(v);
            }
        };
        for s in &self.series {
            for (i, &(x, y)) in s.points.iter().enumerate() {
                grow(&mut xr, self.tx(x));
                grow(&mut yr, self.ty(y));
                if let Some(b) = &s.band {
                    grow(&mut yr, self.ty(b[i].0));
                    grow(&mut yr, self.ty(b[i].1));
                }
            }
        }
        let fix = |r: (f64, f64)| {
            if !r.0.is_finite() {
                (0.0, 1.0)
            } else if r.1 - r.0 < 1e-12 * r.0.abs().max(1.0) {
                (r.0 - 0.5, r.1 + 0.5)
            } else {
                let pad = 0.05 * (r.1 - r.0);
                (r.0 - pad, r.1 + pad)
            }
        };
        (fix(xr), fix(yr))
    }

    /// SVG document; `run` is embedded as a comment.
    pub fn render(&self, run: &str) -> String {
        let ((x0, x1), (y0, y1)) = self.ranges();
        let px = |v: f64| LEFT + (v - x0) / (x1 - x0) * (W - LEFT - RIGHT);
        let py = |v: f64| H - BOTTOM - (v - y0) / (y1 - y0) * (H - TOP - BOTTOM);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(s, "<!-- run {run} -->");
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
            W / 2.0,
            escape(&self.title)
        );
        let (bx0, bx1, by0, by1) = (LEFT, W - RIGHT, TOP, H - BOTTOM);
        let _ = writeln!(
            s,
            r#"<rect x="{bx0}" y="{by0}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            bx1 - bx0,
            by1 - by0
        );
        for i in 0..=4 {
            let f = i as f64 / 4.0;
            let xv = x0 + f * (x1 - x0);
            let yv = y0 + f * (y1 - y0);
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
                px(xv),
                by1 + 16.0,
                tick(xv, self.log_x)
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
                bx0 - 6.0,
                py(yv) + 4.0,
                tick(yv, self.log_y)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
            (bx0 + bx1) / 2.0,
            H - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
            (by0 + by1) / 2.0,
            (by0 + by1) / 2.0,
            escape(&self.y_label)
        );
        for (k, ser) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            if let Some(band) = &ser.band {
                let mut upper = Vec::new();
                let mut lower = Vec::new();
                for (&(x, _), &(lo, hi)) in ser.points.iter().zip(band) {
                    if let (Some(x), Some(lo), Some(hi)) = (self.tx(x), self.ty(lo), self.ty(hi)) {
                        upper.push(format!("{:.2},{:.2}", px(x), py(hi)));
                        lower.push(format!("{:.2},{:.2}", px(x), py(lo)));
                    }
                }
                lower.reverse();
                upper.extend(lower);
                let _ = writeln!(
                    s,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                    upper.join(" ")
                );
            }
            let pts: Vec<String> = ser
                .points
                .iter()
                .filter_map(|&(x, y)| Some(format!("{:.2},{:.2}", px(self.tx(x)?), py(self.ty(y)?))))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                pts.join(" ")
            );
            for p in &pts {
                let (x, y) = p.split_once(',').unwrap();
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2.5" fill="{color}"/>"#);
            }
            let ly = by0 + 16.0 + 16.0 * k as f64;
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="12" fill="{color}">{}</text>"#,
                bx0 + 10.0,
                escape(&ser.label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64, log: bool) -> String {
    let v = if log { 10f64.powf(v) } else { v };
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_series_and_band() {
        let p = Plot::new("t", "x", "y")
            .add(Series::new("a", vec![(1.0, 2.0), (2.0, 3.0)]).with_band(vec![(1.5, 2.5), (2.5, 3.5)]));
        let svg = p.render("abc");
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<!-- run abc -->"));
        assert_eq!(svg.matches("<polygon").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 2);
    }

    #[test]
    fn log_axes_drop_nonpositive_points() {
        let p = Plot::new("t", "x", "y")
            .log_log()
            .add(Series::new("a", vec![(1.0, 1.0), (10.0, 0.0), (100.0, 0.01)]));
        assert_eq!(p.render("r").matches("<circle").count(), 2);
    }
}
