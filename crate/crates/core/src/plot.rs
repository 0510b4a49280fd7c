//! Minimal SVG rendering for heat maps, line plots and scattered-value maps.

use std::fmt::Write;

use crate::calibration::ErrorMap;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 90.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

#[derive(Debug, Clone, Copy)]
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let widen = |(lo, hi): (f64, f64)| {
            if !(lo.is_finite() && hi.is_finite()) {
                (0.0, 1.0)
            } else if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        Self { x: widen(x), y: widen(y) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn range(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    values
        .into_iter()
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Linear blue-green-yellow ramp over `t ∈ [0, 1]`.
fn color(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let s = t * (STOPS.len() - 1) as f64;
    let i = (s.floor() as usize).min(STOPS.len() - 2);
    let f = s - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * f).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

fn open(out: &mut String, title: &str) {
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>
"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, x1) = (frame.px(frame.x.0), frame.px(frame.x.1));
    let (y0, y1) = (frame.py(frame.y.0), frame.py(frame.y.1));
    let _ = writeln!(out, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let xv = frame.x.0 + f * (frame.x.1 - frame.x.0);
        let yv = frame.y.0 + f * (frame.y.1 - frame.y.0);
        let (px, py) = (frame.px(xv), frame.py(yv));
        let _ = writeln!(out, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, y0 + 18.0, tick_label(xv));
        let _ = writeln!(out, r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, py + 4.0, tick_label(yv));
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn color_bar(out: &mut String, lo: f64, hi: f64, label: &str) {
    let x = WIDTH - RIGHT + 20.0;
    let (top, bottom) = (TOP, HEIGHT - BOTTOM);
    let steps = 32;
    let h = (bottom - top) / steps as f64;
    for k in 0..steps {
        let t = (k as f64 + 0.5) / steps as f64;
        let _ = writeln!(out, r#"<rect x="{x:.2}" y="{:.2}" width="16" height="{:.2}" fill="{}"/>"#, bottom - (k + 1) as f64 * h, h + 0.5, color(t));
    }
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 20.0, top + 4.0, tick_label(hi));
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 20.0, bottom + 4.0, tick_label(lo));
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x, top - 8.0, escape(label));
}

/// Grid of cells, row-major over `(xs, ys)`; missing cells are left grey.
pub fn heat_map(
    title: &str,
    (x_label, y_label, value_label): (&str, &str, &str),
    xs: &[f64],
    ys: &[f64],
    values: &[Option<f64>],
    marker: Option<(f64, f64)>,
) -> String {
    let edges = |g: &[f64]| -> Vec<f64> {
        match g.len() {
            0 => vec![0.0, 1.0],
            1 => vec![g[0] - 0.5 * g[0].abs().max(1e-3), g[0] + 0.5 * g[0].abs().max(1e-3)],
            n => {
                let mut e = Vec::with_capacity(n + 1);
                e.push(g[0] - (g[1] - g[0]) / 2.0);
                e.extend(g.windows(2).map(|w| (w[0] + w[1]) / 2.0));
                e.push(g[n - 1] + (g[n - 1] - g[n - 2]) / 2.0);
                e
            }
        }
    };
    let (ex, ey) = (edges(xs), edges(ys));
    let frame = Frame::new((ex[0], ex[ex.len() - 1]), (ey[0], ey[ey.len() - 1]));
    let (lo, hi) = range(values.iter().flatten().copied());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    open(&mut out, title);
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            let fill = match values.get(i * ys.len() + j).copied().flatten() {
                Some(v) => color((v - lo) / span),
                None => "#cccccc".to_string(),
            };
            let (x0, x1) = (frame.px(ex[i]), frame.px(ex[i + 1]));
            let (y0, y1) = (frame.py(ey[j]), frame.py(ey[j + 1]));
            let _ = writeln!(out, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#, x1 - x0 + 0.3, y0 - y1 + 0.3);
        }
    }
    if let Some((mx, my)) = marker {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="6" fill="red" stroke="white"/>"#, frame.px(mx), frame.py(my));
    }
    axes(&mut out, &frame, x_label, y_label);
    color_bar(&mut out, lo, hi, value_label);
    out.push_str("</svg>\n");
    out
}

#[derive(Debug, Clone)]
pub struct Line<'a> {
    pub name: &'a str,
    pub x: &'a [f64],
    pub y: &'a [f64],
    /// Symmetric half-width drawn as a shaded band around `y`.
    pub band: Option<&'a [f64]>,
}

impl<'a> Line<'a> {
    pub fn new(name: &'a str, x: &'a [f64], y: &'a [f64]) -> Self {
        Self { name, x, y, band: None }
    }

    pub fn with_band(mut self, band: &'a [f64]) -> Self {
        self.band = Some(band);
        self
    }
}

/// Line plot with optional shaded bands and labelled horizontal reference lines.
pub fn line_plot(title: &str, (x_label, y_label): (&str, &str), lines: &[Line], references: &[(f64, &str)]) -> String {
    let (xlo, xhi) = range(lines.iter().flat_map(|l| l.x.iter().copied()));
    let ys = lines.iter().flat_map(|l| {
        let band = l.band.unwrap_or(&[]);
        l.y.iter().enumerate().flat_map(move |(i, &y)| {
            let b = band.get(i).copied().unwrap_or(0.0);
            [y - b, y + b]
        })
    });
    let (ylo, yhi) = range(ys.chain(references.iter().map(|r| r.0)));
    let frame = Frame::new((xlo, xhi), (ylo, yhi));
    let mut out = String::new();
    open(&mut out, title);
    for (k, l) in lines.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        if let Some(band) = l.band {
            let mut pts = String::new();
            for (i, (&x, &y)) in l.x.iter().zip(l.y).enumerate() {
                let _ = write!(pts, "{:.2},{:.2} ", frame.px(x), frame.py(y + band.get(i).copied().unwrap_or(0.0)));
            }
            for (i, (&x, &y)) in l.x.iter().zip(l.y).enumerate().rev() {
                let _ = write!(pts, "{:.2},{:.2} ", frame.px(x), frame.py(y - band.get(i).copied().unwrap_or(0.0)));
            }
            let _ = writeln!(out, r#"<polygon points="{}" fill="{c}" fill-opacity="0.2" stroke="none"/>"#, pts.trim_end());
        }
        let mut pts = String::new();
        for (&x, &y) in l.x.iter().zip(l.y) {
            if x.is_finite() && y.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", frame.px(x), frame.py(y));
            }
        }
        let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, pts.trim_end());
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" fill="{c}">{}</text>"#, WIDTH - RIGHT + 8.0, TOP + 14.0 + 16.0 * k as f64, escape(l.name));
    }
    for &(v, label) in references {
        let py = frame.py(v);
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black" stroke-dasharray="6 4"/>"#,
            frame.px(frame.x.0),
            frame.px(frame.x.1)
        );
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, frame.px(frame.x.1) + 4.0, py + 4.0, escape(label));
    }
    axes(&mut out, &frame, x_label, y_label);
    out.push_str("</svg>\n");
    out
}

/// Triangulated error map, each triangle filled with its mean vertex value.
pub fn error_map(title: &str, value_label: &str, map: &ErrorMap) -> String {
    let pts = map.points();
    let frame = Frame::new(range(pts.iter().map(|p| p.0)), range(pts.iter().map(|p| p.1)));
    let (lo, hi) = range(map.values().iter().copied());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    open(&mut out, title);
    for t in map.triangles() {
        let v = t.iter().map(|&i| map.values()[i]).sum::<f64>() / 3.0;
        let coords: Vec<String> = t.iter().map(|&i| format!("{:.2},{:.2}", frame.px(pts[i].0), frame.py(pts[i].1))).collect();
        let _ = writeln!(out, r#"<polygon points="{}" fill="{}" stroke="white" stroke-width="0.5"/>"#, coords.join(" "), color((v - lo) / span));
    }
    for p in pts {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, frame.px(p.0), frame.py(p.1));
    }
    axes(&mut out, &frame, "x (m)", "y (m)");
    color_bar(&mut out, lo, hi, value_label);
    out.push_str("</svg>\n");
    out
}

/// Points coloured by value, for COP error fields.
pub fn scatter_map(title: &str, value_label: &str, points: &[(f64, f64)], values: &[f64]) -> String {
    let frame = Frame::new(range(points.iter().map(|p| p.0)), range(points.iter().map(|p| p.1)));
    let (lo, hi) = range(values.iter().copied());
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = String::new();
    open(&mut out, title);
    for (p, v) in points.iter().zip(values) {
        let _ = writeln!(
            out,
            r#"<circle cx="{:.2}" cy="{:.2}" r="7" fill="{}" stroke="black" stroke-width="0.5"/>"#,
            frame.px(p.0),
            frame.py(p.1),
            color((v - lo) / span)
        );
    }
    axes(&mut out, &frame, "x (m)", "y (m)");
    color_bar(&mut out, lo, hi, value_label);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn well_formed(svg: &str) {
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(!svg.contains("NaN") && !svg.contains("inf"));
    }

    #[test]
    fn heat_map_marks_selection() {
        let xs = [1.0, 1.5, 2.0];
        let ys = [0.001, 0.002];
        let vals = [Some(3.0), Some(4.0), Some(2.0), None, Some(1.0), Some(1.5)];
        let svg = heat_map("f_n", ("l", "t", "Hz"), &xs, &ys, &vals, Some((1.5, 0.002)));
        well_formed(&svg);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("#cccccc"));
    }

    #[test]
    fn single_cell_heat_map() {
        well_formed(&heat_map("one", ("l", "t", "Hz"), &[1.5], &[0.002], &[Some(170.0)], None));
    }

    #[test]
    fn line_plot_with_band_and_reference() {
        let x = [0.0, 50.0, 100.0];
        let y = [0.0, 1.0, 0.0];
        let b = [0.1, 0.2, 0.1];
        let svg = line_plot("gait", ("%", "N"), &[Line::new("Fz", &x, &y).with_band(&b)], &[(1.0, "BW")]);
        well_formed(&svg);
        assert!(svg.contains("<polygon") && svg.contains("stroke-dasharray"));
    }

    #[test]
    fn flat_data_does_not_divide_by_zero() {
        let x = [0.0, 1.0];
        let y = [2.0, 2.0];
        well_formed(&line_plot("flat", ("t", "v"), &[Line::new("v", &x, &y)], &[]));
        well_formed(&scatter_map("s", "m", &[(0.0, 0.0), (1.0, 1.0)], &[0.0, 0.0]));
    }

    #[test]
    fn colors_span_ramp() {
        assert_eq!(color(0.0), "#440154");
        assert_eq!(color(1.0), "#fde725");
        assert_eq!(color(f64::NAN), "#440154");
    }
}
