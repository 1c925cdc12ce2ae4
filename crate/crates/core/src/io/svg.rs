//! Minimal line-plot SVG writer.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Style {
    Solid,
    Dashed,
    Heavy,
    Faint,
}

impl Style {
    fn attrs(&self) -> &'static str {
        match self {
            Style::Solid => r##"stroke="#1f4e9c" stroke-width="1.5""##,
            Style::Dashed => r##"stroke="#c0392b" stroke-width="1.5" stroke-dasharray="6 4""##,
            Style::Heavy => r##"stroke="#111111" stroke-width="3""##,
            Style::Faint => r##"stroke="#7f8c8d" stroke-width="0.6""##,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub style: Style,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

const W: f64 = 520.0;
const H: f64 = 360.0;
const M_LEFT: f64 = 70.0;
const M_RIGHT: f64 = 20.0;
const M_TOP: f64 = 36.0;
const M_BOTTOM: f64 = 50.0;

fn bounds(panel: &Panel) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for s in &panel.series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
            }
        }
    }
    if !b.0.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
    let (x0, x1) = pad(b.0, b.1);
    let (y0, y1) = pad(b.2, b.3);
    (x0, x1, y0, y1)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn render_panel(svg: &mut String, panel: &Panel, ox: f64, oy: f64) {
    let (x0, x1, y0, y1) = bounds(panel);
    let pw = W - M_LEFT - M_RIGHT;
    let ph = H - M_TOP - M_BOTTOM;
    let sx = |x: f64| ox + M_LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| oy + M_TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="#333"/>"##,
        ox + M_LEFT,
        oy + M_TOP
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        ox + W / 2.0,
        oy + 22.0,
        escape(&panel.title)
    );
    for t in ticks(x0, x1) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="10">{}</text>"#,
            sx(t),
            oy + H - M_BOTTOM + 14.0,
            fmt_tick(t)
        );
    }
    for t in ticks(y0, y1) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="10">{}</text>"#,
            ox + M_LEFT - 4.0,
            sy(t) + 3.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12">{}</text>"#,
        ox + M_LEFT + pw / 2.0,
        oy + H - 12.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="12" transform="rotate(-90 {:.2} {:.2})">{}</text>"#,
        ox + 16.0,
        oy + M_TOP + ph / 2.0,
        ox + 16.0,
        oy + M_TOP + ph / 2.0,
        escape(&panel.y_label)
    );
    for s in &panel.series {
        let mut path = String::new();
        for &(x, y) in s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = write!(path, "{:.2},{:.2} ", sx(x), sy(y));
        }
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" {} points="{}"><title>{}</title></polyline>"#,
            s.style.attrs(),
            path.trim_end(),
            escape(&s.label)
        );
    }
}

fn fmt_tick(t: f64) -> String {
    if t != 0.0 && (t.abs() >= 1e4 || t.abs() < 1e-2) {
        format!("{t:.1e}")
    } else {
        let s = format!("{t:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Panels laid out left to right.
pub fn render(panels: &[Panel]) -> String {
    let total_w = W * panels.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{H:.0}" viewBox="0 0 {total_w:.0} {H:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        render_panel(&mut svg, p, i as f64 * W, 0.0);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Keep at most `max` points, evenly by index, always including the ends.
pub fn decimate(points: &[(f64, f64)], max: usize) -> Vec<(f64, f64)> {
    if points.len() <= max || max < 2 {
        return points.to_vec();
    }
    (0..max)
        .map(|i| points[i * (points.len() - 1) / (max - 1)])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_every_series() {
        let panel = Panel {
            title: "a < b".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![
                Series { label: "one".into(), points: vec![(0.0, 0.0), (1.0, 1.0)], style: Style::Solid },
                Series { label: "two".into(), points: vec![(0.0, 1.0), (1.0, f64::NAN)], style: Style::Dashed },
            ],
        };
        let svg = render(&[panel.clone(), panel]);
        assert_eq!(svg.matches("<polyline").count(), 4);
        assert!(svg.contains("a &lt; b"));
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn tick_steps() {
        assert_eq!(ticks(0.0, 1.0), vec![0.0, 0.2, 0.4, 0.6000000000000001, 0.8, 1.0]);
        assert_eq!(ticks(-5.0, 5.0), vec![-4.0, -2.0, 0.0, 2.0, 4.0]);
    }

    #[test]
    fn decimation_keeps_ends() {
        let pts: Vec<(f64, f64)> = (0..1000).map(|i| (i as f64, 0.0)).collect();
        let d = decimate(&pts, 11);
        assert_eq!(d.len(), 11);
        assert_eq!(d[0].0, 0.0);
        assert_eq!(d[10].0, 999.0);
    }
}
