//! Minimal SVG ROC plots: unit-square axes, polyline series, point markers and
//! constant-PPV / constant-NPV reference lines.

use std::fmt::Write;

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const SIDE: f64 = 440.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stroke {
    Solid,
    Dashed,
    /// Points only, no connecting line.
    Dots,
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub stroke: Stroke,
}

#[derive(Debug, Clone)]
pub struct Marker {
    pub label: String,
    pub fpf: f64,
    pub tpf: f64,
}

/// A labelled line segment in FPF/TPF coordinates.
pub type Segment = (String, (f64, f64), (f64, f64));

/// Reference lines of constant predictive value at a prevalence.
#[derive(Debug, Clone)]
pub struct PredictiveLines {
    pub prevalence: f64,
    pub ppv: Vec<f64>,
    pub npv: Vec<f64>,
}

impl PredictiveLines {
    /// Default levels: PPV in {0.1, 0.2, 0.5} above the prevalence, NPV in
    /// {0.99, 0.995, 0.999} above one minus the prevalence.
    pub fn at(prevalence: f64) -> Self {
        PredictiveLines {
            prevalence,
            ppv: [0.1, 0.2, 0.5].into_iter().filter(|&v| v > prevalence).collect(),
            npv: [0.99, 0.995, 0.999].into_iter().filter(|&v| v > 1.0 - prevalence).collect(),
        }
    }

    /// Segments clipped to the unit square, with their labels.
    pub fn segments(&self) -> Vec<Segment> {
        let p = self.prevalence;
        let mut out = Vec::new();
        if !(p > 0.0 && p < 1.0) {
            return out;
        }
        for &v in &self.ppv {
            if !(v > p && v < 1.0) {
                continue;
            }
            // TPF = k FPF through the origin.
            let k = v / (1.0 - v) * (1.0 - p) / p;
            let end = if k >= 1.0 { (1.0 / k, 1.0) } else { (1.0, k) };
            out.push((format!("PPV {v}"), (0.0, 0.0), end));
        }
        for &v in &self.npv {
            if !(v > 1.0 - p && v < 1.0) {
                continue;
            }
            // 1 - TPF = m (1 - FPF) through (1, 1).
            let m = (1.0 - p) * (1.0 - v) / (v * p);
            let start = if m <= 1.0 { (0.0, 1.0 - m) } else { (1.0 - 1.0 / m, 0.0) };
            out.push((format!("NPV {v}"), start, (1.0, 1.0)));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct Plot {
    pub title: String,
    pub series: Vec<Series>,
    pub markers: Vec<Marker>,
    pub reference: Option<PredictiveLines>,
}

fn sx(fpf: f64) -> f64 {
    LEFT + SIDE * fpf.clamp(0.0, 1.0)
}

fn sy(tpf: f64) -> f64 {
    TOP + SIDE * (1.0 - tpf.clamp(0.0, 1.0))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

impl Plot {
    pub fn new(title: impl Into<String>) -> Self {
        Plot { title: title.into(), ..Plot::default() }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + SIDE / 2.0, escape(&self.title));
        self.axes(&mut s);
        if let Some(r) = &self.reference {
            let _ = writeln!(s, r##"<g stroke="#999999" stroke-width="0.8" stroke-dasharray="2 3" fill="#777777">"##);
            for (label, a, b) in r.segments() {
                let _ = writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#, sx(a.0), sy(a.1), sx(b.0), sy(b.1));
                let (tx, ty) = if label.starts_with("PPV") { (b.0, b.1) } else { (a.0, a.1) };
                let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" stroke="none" font-size="9">{}</text>"#, sx(tx) + 3.0, sy(ty) - 3.0, label);
            }
            let _ = writeln!(s, "</g>");
        }
        for (i, series) in self.series.iter().enumerate() {
            let colour = PALETTE[i % PALETTE.len()];
            match series.stroke {
                Stroke::Dots => {
                    let _ = writeln!(s, r#"<g fill="{colour}">"#);
                    for &(x, y) in &series.points {
                        let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="1.6"/>"#, sx(x), sy(y));
                    }
                    let _ = writeln!(s, "</g>");
                }
                Stroke::Solid | Stroke::Dashed => {
                    let dash = if series.stroke == Stroke::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let pts: Vec<String> = series.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                    let _ = writeln!(s, r#"<polyline fill="none" stroke="{colour}" stroke-width="1.8"{dash} points="{}"/>"#, pts.join(" "));
                }
            }
        }
        for m in &self.markers {
            let _ = writeln!(
                s,
                r#"<g><circle cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="black" stroke-width="1.2"/><text x="{:.2}" y="{:.2}" font-size="10">{}</text></g>"#,
                sx(m.fpf),
                sy(m.tpf),
                sx(m.fpf) + 6.0,
                sy(m.tpf) + 12.0,
                escape(&m.label)
            );
        }
        self.legend(&mut s);
        s.push_str("</svg>\n");
        s
    }

    fn axes(&self, s: &mut String) {
        let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{SIDE}" height="{SIDE}" fill="none" stroke="#333333"/>"##);
        let _ = writeln!(s, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#dddddd"/>"##, sx(0.0), sy(0.0), sx(1.0), sy(1.0));
        for i in 0..=5 {
            let t = i as f64 / 5.0;
            let _ = writeln!(s, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333333"/>"##, sx(t), sy(0.0), sx(t), sy(0.0) + 5.0);
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{t:.1}</text>"#, sx(t), sy(0.0) + 18.0);
            let _ = writeln!(s, r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333333"/>"##, sx(0.0) - 5.0, sy(t), sx(0.0), sy(t));
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.1}</text>"#, sx(0.0) - 8.0, sy(t) + 4.0);
        }
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">False positive fraction</text>"#, LEFT + SIDE / 2.0, TOP + SIDE + 40.0);
        let _ = writeln!(
            s,
            r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">True positive fraction</text>"#,
            TOP + SIDE / 2.0,
            TOP + SIDE / 2.0
        );
    }

    fn legend(&self, s: &mut String) {
        let x = LEFT + SIDE + 20.0;
        for (i, series) in self.series.iter().enumerate() {
            let y = TOP + 10.0 + 20.0 * i as f64;
            let colour = PALETTE[i % PALETTE.len()];
            match series.stroke {
                Stroke::Dots => {
                    let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{colour}"/>"#, x + 12.0, y);
                }
                Stroke::Solid | Stroke::Dashed => {
                    let dash = if series.stroke == Stroke::Dashed { r#" stroke-dasharray="6 4""# } else { "" };
                    let _ = writeln!(s, r#"<line x1="{x:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{colour}" stroke-width="1.8"{dash}/>"#, x + 24.0);
                }
            }
            let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 30.0, y + 4.0, escape(&series.label));
        }
    }
}
