//! Minimal hand-written SVG line charts.

use std::fmt::Write;

use anyhow::{bail, Result};
use foldpam::control::SimTrace;
use foldpam::ForceStrainCurve;

const WIDTH: f64 = 640.0;
const PANEL_HEIGHT: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 50.0;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f",
];
const DASHES: [&str; 4] = ["", "8 4", "2 3", "10 3 2 3"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Panel {
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Force the y range to include zero.
    pub y_zero: bool,
}

/// Force-strain curves on one panel; a legend is drawn for more than one.
pub fn curves_svg(curves: &[ForceStrainCurve]) -> Result<String> {
    let series = curves
        .iter()
        .map(|c| Series {
            label: c.label().to_string(),
            points: c.points().iter().map(|p| (p.strain, p.force)).collect(),
        })
        .collect();
    render(&[Panel {
        x_label: "strain".into(),
        y_label: "force (N)".into(),
        series,
        y_zero: true,
    }])
}

/// Command and error against time, stacked.
pub fn trace_svg(trace: &SimTrace) -> Result<String> {
    let k = trace.command_scale();
    let pick = |f: &dyn Fn(&foldpam::control::SimRecord) -> f64| -> Vec<(f64, f64)> {
        trace.records.iter().map(|r| (r.time, f(r))).collect()
    };
    render(&[
        Panel {
            x_label: "time (s)".into(),
            y_label: format!("command ({})", trace.command_unit()),
            series: vec![Series {
                label: "command".into(),
                points: pick(&|r| r.command * k),
            }],
            y_zero: false,
        },
        Panel {
            x_label: "time (s)".into(),
            y_label: "error (mm)".into(),
            series: vec![Series {
                label: "error".into(),
                points: pick(&|r| r.error * 1e3),
            }],
            y_zero: true,
        },
    ])
}

/// Tick positions covering `[lo, hi]` at a 1-2-5 step.
fn ticks(lo: f64, hi: f64) -> (Vec<f64>, f64) {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    ((first..=last).map(|i| i as f64 * step).collect(), step)
}

fn tick_label(v: f64, step: f64) -> String {
    let digits = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.digits$}");
    if s.starts_with('-') && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range(vals: impl Iterator<Item = f64>, zero: bool) -> (f64, f64) {
    let (mut lo, mut hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if zero {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    if hi - lo <= 1e-12 * hi.abs().max(lo.abs()).max(1e-300) {
        let pad = if lo == 0.0 { 1.0 } else { 0.5 * lo.abs() };
        return (lo - pad, hi + pad);
    }
    let pad = 0.04 * (hi - lo);
    (
        if zero && lo == 0.0 { 0.0 } else { lo - pad },
        if zero && hi == 0.0 { 0.0 } else { hi + pad },
    )
}

pub fn render(panels: &[Panel]) -> Result<String> {
    if panels.is_empty() {
        bail!("nothing to plot");
    }
    for p in panels {
        if p.series.is_empty() || p.series.iter().any(|s| s.points.is_empty()) {
            bail!("cannot plot empty data");
        }
        if p.series
            .iter()
            .flat_map(|s| &s.points)
            .any(|(x, y)| !(x.is_finite() && y.is_finite()))
        {
            bail!("cannot plot non-finite data");
        }
    }
    let height = PANEL_HEIGHT * panels.len() as f64;
    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#)?;
    for (i, p) in panels.iter().enumerate() {
        panel(&mut out, p, i as f64 * PANEL_HEIGHT)?;
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn panel(out: &mut String, p: &Panel, y0: f64) -> Result<()> {
    let pts = || p.series.iter().flat_map(|s| s.points.iter());
    let (xlo, xhi) = range(pts().map(|q| q.0), false);
    let (ylo, yhi) = range(pts().map(|q| q.1), p.y_zero);
    let (l, r) = (LEFT, WIDTH - RIGHT);
    let (t, b) = (y0 + TOP, y0 + PANEL_HEIGHT - BOTTOM);
    let sx = |x: f64| l + (x - xlo) / (xhi - xlo) * (r - l);
    let sy = |y: f64| b - (y - ylo) / (yhi - ylo) * (b - t);

    writeln!(out, "<g class=\"panel\">")?;
    writeln!(
        out,
        r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        r - l,
        b - t
    )?;
    let (xt, xs) = ticks(xlo, xhi);
    for v in xt {
        let x = sx(v);
        writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{b}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            b + 5.0,
            b + 18.0,
            tick_label(v, xs)
        )?;
    }
    let (yt, ys) = ticks(ylo, yhi);
    for v in yt {
        let y = sy(v);
        writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{l}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            l - 5.0,
            l - 8.0,
            y + 4.0,
            tick_label(v, ys)
        )?;
    }
    writeln!(
        out,
        r#"<text class="x-label" x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (l + r),
        b + 38.0,
        escape(&p.x_label)
    )?;
    let (lx, ly) = (18.0, 0.5 * (t + b));
    writeln!(
        out,
        r#"<text class="y-label" x="{lx}" y="{ly:.2}" text-anchor="middle" transform="rotate(-90 {lx} {ly:.2})">{}</text>"#,
        escape(&p.y_label)
    )?;

    for (i, s) in p.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let dash = DASHES[(i / COLORS.len() + i) % DASHES.len()];
        let dash = if dash.is_empty() {
            String::new()
        } else {
            format!(r#" stroke-dasharray="{dash}""#)
        };
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"><title>{}</title></polyline>"#,
            coords.join(" "),
            escape(&s.label)
        )?;
    }

    if p.series.len() > 1 {
        writeln!(out, "<g class=\"legend\">")?;
        for (i, s) in p.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let dash = DASHES[(i / COLORS.len() + i) % DASHES.len()];
            let y = t + 16.0 + 16.0 * i as f64;
            let x = r - 130.0;
            writeln!(
                out,
                r#"<line x1="{x}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="1.5" stroke-dasharray="{dash}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                x + 24.0,
                x + 30.0,
                y + 4.0,
                escape(&s.label)
            )?;
        }
        writeln!(out, "</g>")?;
    }
    writeln!(out, "</g>")?;
    Ok(())
}
