//! Dependency-free SVG chart rendering for the report emitter.

use std::fmt::Write;

use crate::learners::Algorithm;
use crate::tradeoff::Frontier;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 130.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// Fixed palette indexed by algorithm order so colors are stable across runs.
pub fn color_of(algorithm: Algorithm) -> &'static str {
    const PALETTE: [&str; 6] =
        ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    let idx = Algorithm::ALL.iter().position(|a| *a == algorithm).unwrap();
    PALETTE[idx]
}

pub struct Series {
    pub name: String,
    pub color: &'static str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy)]
pub enum Scale {
    Linear,
    Log10,
}

struct Axis {
    min: f64,
    max: f64,
    scale: Scale,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, scale: Scale) -> Axis {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for v in values {
            let v = match scale {
                Scale::Linear => v,
                // sub-microsecond times clamp to the bottom decade
                Scale::Log10 => v.max(1e-6),
            };
            min = min.min(v);
            max = max.max(v);
        }
        if !min.is_finite() {
            // no data points at all: pick a harmless default range
            match scale {
                Scale::Linear => {
                    min = 0.0;
                    max = 1.0;
                }
                Scale::Log10 => {
                    min = 0.1;
                    max = 1.0;
                }
            }
        }
        if min == max {
            min -= 0.5;
            max += 0.5;
        }
        if let Scale::Log10 = scale {
            min = min.log10().floor();
            max = max.log10().ceil();
            if min == max {
                max += 1.0;
            }
        }
        Axis { min, max, scale }
    }

    fn project(&self, v: f64) -> f64 {
        let v = match self.scale {
            Scale::Linear => v,
            Scale::Log10 => v.max(1e-6).log10(),
        };
        (v - self.min) / (self.max - self.min)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match self.scale {
            Scale::Linear => (0..=5)
                .map(|i| {
                    let v = self.min + (self.max - self.min) * i as f64 / 5.0;
                    (v, short_num(v))
                })
                .collect(),
            Scale::Log10 => {
                let lo = self.min as i64;
                let hi = self.max as i64;
                (lo..=hi).map(|e| (10f64.powi(e as i32), format!("1e{e}"))).collect()
            }
        }
    }
}

fn short_num(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.abs() >= 1000.0 || v.abs() < 0.01 {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    }
}

fn px(x: f64) -> String {
    format!("{x:.2}")
}

struct Canvas {
    body: String,
    x: Axis,
    y: Axis,
}

impl Canvas {
    fn new(title: &str, x_label: &str, y_label: &str, x: Axis, y: Axis) -> Canvas {
        let mut body = String::new();
        let _ = write!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>
<text x="{tx}" y="24" text-anchor="middle" font-size="16">{title}</text>
<text x="{tx}" y="{bx}" text-anchor="middle">{x_label}</text>
<text x="18" y="{my}" text-anchor="middle" transform="rotate(-90 18 {my})">{y_label}</text>
"#,
            tx = (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            bx = HEIGHT - 12.0,
            my = (MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0,
        );
        let mut canvas = Canvas { body, x, y };
        canvas.draw_axes();
        canvas
    }

    fn to_px(&self, p: (f64, f64)) -> (f64, f64) {
        let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        (
            MARGIN_LEFT + self.x.project(p.0) * plot_w,
            HEIGHT - MARGIN_BOTTOM - self.y.project(p.1) * plot_h,
        )
    }

    fn draw_axes(&mut self) {
        let x0 = MARGIN_LEFT;
        let x1 = WIDTH - MARGIN_RIGHT;
        let y0 = HEIGHT - MARGIN_BOTTOM;
        let y1 = MARGIN_TOP;
        let _ = write!(
            self.body,
            r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>
<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>
"#
        );
        for (v, label) in self.x.ticks() {
            let (px_x, _) = self.to_px((v, 0.0));
            let _ = write!(
                self.body,
                r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{yt}" stroke="black"/>
<text x="{x}" y="{yl}" text-anchor="middle">{label}</text>
"#,
                x = px(px_x),
                yt = y0 + 5.0,
                yl = y0 + 20.0,
            );
        }
        for (v, label) in self.y.ticks() {
            let v_lin = match self.y.scale {
                Scale::Linear => v,
                Scale::Log10 => v,
            };
            let (_, py) = self.to_px((0.0, v_lin));
            let _ = write!(
                self.body,
                r#"<line x1="{xt}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>
<text x="{xl}" y="{yt}" text-anchor="end">{label}</text>
"#,
                y = px(py),
                xt = x0 - 5.0,
                xl = x0 - 8.0,
                yt = py + 4.0,
            );
        }
    }

    fn polyline(&mut self, points: &[(f64, f64)], color: &str, dashed: bool) {
        if points.is_empty() {
            return;
        }
        let coords: Vec<String> = points
            .iter()
            .map(|&p| {
                let (x, y) = self.to_px(p);
                format!("{},{}", px(x), px(y))
            })
            .collect();
        let dash = if dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = write!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"{dash}/>
"#,
            coords.join(" ")
        );
    }

    fn circle(&mut self, p: (f64, f64), r: f64, fill: &str, stroke: &str) {
        let (x, y) = self.to_px(p);
        let _ = write!(
            self.body,
            r#"<circle cx="{}" cy="{}" r="{r}" fill="{fill}" stroke="{stroke}" stroke-width="1.5"/>
"#,
            px(x),
            px(y)
        );
    }

    fn label(&mut self, p: (f64, f64), dx: f64, dy: f64, text: &str, color: &str) {
        let (x, y) = self.to_px(p);
        let _ = write!(
            self.body,
            r#"<text x="{}" y="{}" fill="{color}">{text}</text>
"#,
            px(x + dx),
            px(y + dy)
        );
    }

    fn legend(&mut self, entries: &[(String, &str)]) {
        let x = WIDTH - MARGIN_RIGHT + 15.0;
        for (i, (name, color)) in entries.iter().enumerate() {
            let y = MARGIN_TOP + 10.0 + i as f64 * 20.0;
            let _ = write!(
                self.body,
                r#"<rect x="{x}" y="{ry}" width="12" height="12" fill="{color}"/>
<text x="{tx}" y="{ty}">{name}</text>
"#,
                ry = y - 10.0,
                tx = x + 18.0,
                ty = y,
            );
        }
    }

    fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Multi-series line chart; `y_scale` selects linear or log10 y axis.
pub fn line_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
    y_scale: Scale,
) -> String {
    let x_axis = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), Scale::Linear);
    let y_axis = Axis::fit(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), y_scale);
    let mut canvas = Canvas::new(title, x_label, y_label, x_axis, y_axis);
    for s in series {
        canvas.polyline(&s.points, s.color, false);
        for &p in &s.points {
            canvas.circle(p, 3.0, s.color, s.color);
        }
    }
    canvas.legend(&series.iter().map(|s| (s.name.clone(), s.color)).collect::<Vec<_>>());
    canvas.finish()
}

/// Quality-vs-time scatter for one size: all points drawn, Pareto points
/// marked with rings, hull drawn as a polyline.
pub fn frontier_chart(title: &str, frontier: &Frontier) -> String {
    let x_axis = Axis::fit(frontier.points.iter().map(|p| p.time_s), Scale::Linear);
    let y_axis = Axis::fit(frontier.points.iter().map(|p| p.quality), Scale::Linear);
    let mut canvas = Canvas::new(title, "time [s]", "quality (macro F1)", x_axis, y_axis);
    let hull_points: Vec<(f64, f64)> =
        frontier.hull.iter().map(|p| (p.time_s, p.quality)).collect();
    canvas.polyline(&hull_points, "#555555", true);
    for p in &frontier.points {
        let color = color_of(p.algorithm);
        canvas.circle((p.time_s, p.quality), 4.0, color, color);
        canvas.label((p.time_s, p.quality), 8.0, 4.0, p.algorithm.tag(), color);
    }
    for p in &frontier.pareto {
        canvas.circle((p.time_s, p.quality), 7.0, "none", "#000000");
    }
    canvas.finish()
}
