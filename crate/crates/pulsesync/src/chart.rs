//! Self-contained SVG line charts from result tables: linear or log-10
//! x axis, one polyline per selected column, optional min/max error bars.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::table::ResultTable;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 46.0;
const MARGIN_BOTTOM: f64 = 64.0;

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// What to draw from a table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlotSpec {
    /// Column providing x values.
    pub x: String,
    /// Columns plotted as lines, in order.
    pub ys: Vec<String>,
    /// Optional (low, high) columns drawn as vertical error bars around
    /// the first y series.
    pub err: Option<(String, String)>,
    /// Log-10 x axis (all x values must be positive).
    pub log_x: bool,
    /// Chart title.
    pub title: String,
}

struct Mapper {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    log_x: bool,
}

impl Mapper {
    fn x(&self, v: f64) -> f64 {
        let v = if self.log_x { v.log10() } else { v };
        let frac = (v - self.x_lo) / (self.x_hi - self.x_lo);
        MARGIN_LEFT + frac * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let frac = (v - self.y_lo) / (self.y_hi - self.y_lo);
        HEIGHT - MARGIN_BOTTOM - frac * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

/// Round a raw step up to the nearest 1/2/5 x 10^k.
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.abs().log10().floor());
    let norm = raw / mag;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

fn linear_ticks(lo: f64, hi: f64) -> Vec<f64> {
    if hi <= lo {
        return vec![lo];
    }
    let step = nice_step((hi - lo) / 5.0);
    let first = (lo / step).ceil();
    let mut ticks = Vec::new();
    let mut k = first;
    while k * step <= hi + step * 1e-9 {
        ticks.push(k * step);
        k += 1.0;
    }
    ticks
}

fn decade_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let first = lo.ceil() as i32;
    let last = hi.floor() as i32;
    (first..=last).map(|k| 10f64.powi(k)).collect()
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let mag = v.abs();
    if (1e-3..1e4).contains(&mag) {
        let s = format!("{v}");
        if s.len() <= 8 {
            s
        } else {
            format!("{v:.4}")
        }
    } else {
        format!("{v:e}")
    }
}

/// Render a chart as a standalone SVG document.
pub fn render_svg(table: &ResultTable, spec: &PlotSpec) -> Result<String> {
    if spec.ys.is_empty() {
        return Err(Error::InvalidRange("no y columns selected".into()));
    }
    let xs = table.column_values(&spec.x)?;
    if xs.is_empty() {
        return Err(Error::InvalidRange("table has no rows".into()));
    }
    let series: Vec<(String, Vec<f64>)> = spec
        .ys
        .iter()
        .map(|name| Ok((name.clone(), table.column_values(name)?)))
        .collect::<Result<_>>()?;
    let err = match &spec.err {
        Some((lo, hi)) => Some((table.column_values(lo)?, table.column_values(hi)?)),
        None => None,
    };

    if spec.log_x && xs.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidRange(
            "log x axis requires positive x values".into(),
        ));
    }

    let (mut x_lo, mut x_hi) = min_max(xs.iter().copied());
    if spec.log_x {
        x_lo = x_lo.log10();
        x_hi = x_hi.log10();
    }
    let mut all_y: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    if let Some((lo, hi)) = &err {
        all_y.extend(lo.iter().copied());
        all_y.extend(hi.iter().copied());
    }
    let (mut y_lo, mut y_hi) = min_max(all_y.iter().copied());
    pad_range(&mut x_lo, &mut x_hi);
    pad_range(&mut y_lo, &mut y_hi);
    let map = Mapper {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
        log_x: spec.log_x,
    };

    let mut svg = String::new();
    write!(
        svg,
        r#"<svg version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" xmlns="http://www.w3.org/2000/svg">"#
    )
    .unwrap();
    write!(
        svg,
        "<metadata>generated by pulsesync {}</metadata>",
        env!("CARGO_PKG_VERSION")
    )
    .unwrap();
    write!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    write!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        xml_escape(&spec.title)
    )
    .unwrap();

    // Gridlines and tick labels.
    let x_ticks = if spec.log_x {
        decade_ticks(x_lo, x_hi)
    } else {
        linear_ticks(x_lo, x_hi)
    };
    for t in &x_ticks {
        let px = map.x(*t);
        write!(
            svg,
            r##"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            MARGIN_TOP,
            HEIGHT - MARGIN_BOTTOM
        )
        .unwrap();
        write!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            HEIGHT - MARGIN_BOTTOM + 18.0,
            format_tick(*t)
        )
        .unwrap();
    }
    for t in linear_ticks(y_lo, y_hi) {
        let py = map.y(t);
        write!(
            svg,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="#dddddd"/>"##,
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        )
        .unwrap();
        write!(
            svg,
            r#"<text x="{:.2}" y="{py:.2}" text-anchor="end" dominant-baseline="middle" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN_LEFT - 8.0,
            format_tick(t)
        )
        .unwrap();
    }

    // Axes.
    write!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM,
        WIDTH - MARGIN_RIGHT,
        HEIGHT - MARGIN_BOTTOM
    )
    .unwrap();
    write!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN_LEFT,
        MARGIN_TOP,
        MARGIN_LEFT,
        HEIGHT - MARGIN_BOTTOM
    )
    .unwrap();
    write!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        MARGIN_LEFT + (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / 2.0,
        HEIGHT - 14.0,
        xml_escape(&spec.x)
    )
    .unwrap();

    // Error bars under the lines.
    if let Some((lo, hi)) = &err {
        for ((&x, &l), &h) in xs.iter().zip(lo.iter()).zip(hi.iter()) {
            let px = map.x(x);
            let y1 = map.y(l);
            let y2 = map.y(h);
            write!(
                svg,
                r##"<line x1="{px:.2}" y1="{y1:.2}" x2="{px:.2}" y2="{y2:.2}" stroke="#888888" class="errorbar"/>"##
            )
            .unwrap();
            for y in [y1, y2] {
                write!(
                    svg,
                    r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#888888"/>"##,
                    px - 4.0,
                    px + 4.0
                )
                .unwrap();
            }
        }
    }

    // Series polylines and legend.
    for (i, (name, values)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points = xs
            .iter()
            .zip(values.iter())
            .map(|(&x, &y)| format!("{:.2},{:.2}", map.x(x), map.y(y)))
            .collect::<Vec<_>>()
            .join(" ");
        write!(
            svg,
            r#"<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>"#
        )
        .unwrap();
        let ly = MARGIN_TOP + 16.0 * i as f64;
        write!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="12" height="12" fill="{color}"/>"#,
            WIDTH - MARGIN_RIGHT - 150.0,
            ly
        )
        .unwrap();
        write!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{}</text>"#,
            WIDTH - MARGIN_RIGHT - 132.0,
            ly + 10.0,
            xml_escape(name)
        )
        .unwrap();
    }

    svg.push_str("</svg>");
    Ok(svg)
}

/// Render and write a chart to a file.
pub fn emit_svg(table: &ResultTable, spec: &PlotSpec, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(table, spec)?)?;
    Ok(())
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn pad_range(lo: &mut f64, hi: &mut f64) {
    if *hi > *lo {
        let pad = (*hi - *lo) * 0.05;
        *lo -= pad;
        *hi += pad;
    } else {
        let pad = lo.abs().max(1e-12);
        *lo -= pad;
        *hi += pad;
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
