//! Hand-written SVG regret curves: mean line and a `mean ± band` shaded
//! region per algorithm, linear axes, legend on the right.

use std::fmt::Write as _;

use momab_core::AggregateResult;

use crate::output::SummaryRow;

pub const WIDTH: f64 = 760.0;
pub const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const TICKS: usize = 5;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub t: Vec<f64>,
    pub mean: Vec<f64>,
    pub band: Vec<f64>,
}

impl From<&AggregateResult> for Series {
    fn from(a: &AggregateResult) -> Self {
        Series {
            name: a.algorithm.name().to_string(),
            t: a.t.iter().map(|&t| t as f64).collect(),
            mean: a.mean.clone(),
            band: a.band.clone(),
        }
    }
}

/// Groups summary rows by algorithm, in order of first appearance.
pub fn series_from_summary(rows: &[SummaryRow]) -> Vec<Series> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|s| s.name == r.algorithm) {
            Some(i) => i,
            None => {
                out.push(Series {
                    name: r.algorithm.clone(),
                    t: Vec::new(),
                    mean: Vec::new(),
                    band: Vec::new(),
                });
                out.len() - 1
            }
        };
        let s = &mut out[idx];
        s.t.push(r.t as f64);
        s.mean.push(r.mean);
        s.band.push(r.band);
    }
    out
}

/// Data-to-pixel mapping of the plot area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Frame {
    pub fn fit(series: &[Series]) -> Frame {
        let mut f = Frame {
            x0: 0.0,
            x1: f64::MIN,
            y0: 0.0,
            y1: f64::MIN,
        };
        for s in series {
            for i in 0..s.t.len() {
                f.x1 = f.x1.max(s.t[i]);
                f.y0 = f.y0.min(s.mean[i] - s.band[i]);
                f.y1 = f.y1.max(s.mean[i] + s.band[i]);
            }
        }
        if f.x1 <= f.x0 {
            f.x1 = f.x0 + 1.0;
        }
        if f.y1 <= f.y0 {
            f.y1 = f.y0 + 1.0;
        } else {
            f.y1 += 0.05 * (f.y1 - f.y0);
        }
        f
    }

    pub fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }

    pub fn data_x(&self, px: f64) -> f64 {
        self.x0 + (px - LEFT) / (WIDTH - LEFT - RIGHT) * (self.x1 - self.x0)
    }

    pub fn data_y(&self, py: f64) -> f64 {
        self.y0 + (HEIGHT - BOTTOM - py) / (HEIGHT - TOP - BOTTOM) * (self.y1 - self.y0)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e5 || v.abs() < 1e-2 {
        format!("{v:.1e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn points(pts: impl Iterator<Item = (f64, f64)>) -> String {
    pts.map(|(x, y)| format!("{x:.3},{y:.3}")).collect::<Vec<_>>().join(" ")
}

pub fn render_svg(title: &str, y_label: &str, series: &[Series]) -> String {
    let f = Frame::fit(series);
    let mut svg = String::new();
    let (right_edge, bottom_edge) = (WIDTH - RIGHT, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        (LEFT + right_edge) / 2.0,
        escape(title)
    );

    // Axes and ticks.
    let _ = writeln!(
        svg,
        r#"<path class="axes" d="M{LEFT},{TOP} V{bottom_edge} H{right_edge}" fill="none" stroke="black"/>"#
    );
    for i in 0..=TICKS {
        let xv = f.x0 + (f.x1 - f.x0) * i as f64 / TICKS as f64;
        let x = f.px(xv);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.3}" y1="{bottom_edge}" x2="{x:.3}" y2="{:.1}" stroke="black"/><text x="{x:.3}" y="{:.1}" text-anchor="middle">{}</text>"#,
            bottom_edge + 5.0,
            bottom_edge + 18.0,
            tick_label(xv)
        );
        let yv = f.y0 + (f.y1 - f.y0) * i as f64 / TICKS as f64;
        let y = f.py(yv);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text x="{:.1}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">t</text>"#,
        (LEFT + right_edge) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        (TOP + bottom_edge) / 2.0,
        (TOP + bottom_edge) / 2.0,
        escape(y_label)
    );

    for (idx, s) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let name = escape(&s.name);
        let upper = (0..s.t.len()).map(|i| (f.px(s.t[i]), f.py(s.mean[i] + s.band[i])));
        let lower = (0..s.t.len()).rev().map(|i| (f.px(s.t[i]), f.py(s.mean[i] - s.band[i])));
        let _ = writeln!(
            svg,
            r#"<polygon class="band" data-algorithm="{name}" points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            points(upper.chain(lower))
        );
        let _ = writeln!(
            svg,
            r#"<polyline class="mean" data-algorithm="{name}" points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points((0..s.t.len()).map(|i| (f.px(s.t[i]), f.py(s.mean[i]))))
        );
        let ly = TOP + 10.0 + 22.0 * idx as f64;
        let lx = right_edge + 16.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="3"/><text class="legend" x="{:.1}" y="{:.1}">{name}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
