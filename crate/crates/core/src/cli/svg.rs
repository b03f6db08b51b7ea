//! Self-contained SVG rendering of datasets: polar patterns, line plots and
//! bar charts. Output is a pure function of the dataset.

use std::fmt::Write;

use super::output::{format_significant, Dataset, PlotKind, PlotSpec};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

const FONT: &str = "font-family=\"sans-serif\" font-size=\"11\"";

const POLAR_SIZE: f64 = 440.0;
const POLAR_RADIUS: f64 = 160.0;
const PANEL_WIDTH: f64 = 480.0;
const PANEL_HEIGHT: f64 = 340.0;
const MARGIN_LEFT: f64 = 84.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 70.0;
const TITLE_HEIGHT: f64 = 30.0;

/// Rows of one curve.
struct Series {
    label: Option<String>,
    x: Vec<f64>,
    y: Vec<f64>,
    categories: Vec<String>,
}

struct Panel {
    label: Option<String>,
    series: Vec<Series>,
}

pub fn render(ds: &Dataset) -> Result<String, String> {
    let plot = ds
        .plot
        .as_ref()
        .ok_or_else(|| format!("`{}` has no plot description", ds.title))?;
    let panels = split(ds, plot)?;
    let (panel_w, panel_h) = match plot.kind {
        PlotKind::Polar => (POLAR_SIZE, POLAR_SIZE + 20.0),
        PlotKind::Line | PlotKind::Bar => (PANEL_WIDTH, PANEL_HEIGHT + 40.0),
    };
    let legend_rows = panels.iter().map(|p| p.series.iter().filter(|s| s.label.is_some()).count()).max().unwrap_or(0);
    let legend_h = 16.0 * legend_rows as f64 + if legend_rows > 0 { 10.0 } else { 0.0 };
    let width = panel_w * panels.len() as f64;
    let height = TITLE_HEIGHT + panel_h + legend_h;

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    )
    .unwrap();
    writeln!(svg, "<title>{}</title>", escape(&ds.title)).unwrap();
    writeln!(svg, "<rect x=\"0\" y=\"0\" width=\"{width:.0}\" height=\"{height:.0}\" fill=\"white\"/>").unwrap();
    writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">{}</text>",
        width / 2.0,
        escape(&ds.title)
    )
    .unwrap();

    let mut meta = Vec::new();
    for (i, panel) in panels.iter().enumerate() {
        let x0 = panel_w * i as f64;
        let y0 = TITLE_HEIGHT;
        writeln!(svg, "<g transform=\"translate({x0:.2},{y0:.2})\">").unwrap();
        if let Some(label) = &panel.label {
            writeln!(
                svg,
                "<text x=\"{:.2}\" y=\"12\" text-anchor=\"middle\" {FONT}>{}</text>",
                panel_w / 2.0,
                escape(label)
            )
            .unwrap();
        }
        match plot.kind {
            PlotKind::Polar => meta.push(polar(&mut svg, panel, plot)),
            PlotKind::Line => line(&mut svg, panel, plot),
            PlotKind::Bar => bars(&mut svg, panel, plot),
        }
        legend(&mut svg, panel, panel_h + 4.0);
        svg.push_str("</g>\n");
    }
    if plot.kind == PlotKind::Polar {
        let r_max: Vec<String> = meta.iter().map(|r| format_significant(*r, 6)).collect();
        writeln!(
            svg,
            "<metadata>radial-scale=linear; r-max={}; theta-zero=top; theta-direction=clockwise-mirrored</metadata>",
            r_max.join(",")
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn split(ds: &Dataset, plot: &PlotSpec) -> Result<Vec<Panel>, String> {
    let need = |name: &str| ds.column(name).ok_or_else(|| format!("missing column `{name}`"));
    // numeric group labels read better with their column name attached
    let labels = |name: &Option<String>| -> Result<Option<Vec<String>>, String> {
        name.as_ref()
            .map(|n| {
                need(n).map(|c| match c.as_f64() {
                    Some(_) => c.cells().into_iter().map(|v| format!("{n}={v}")).collect(),
                    None => c.cells(),
                })
            })
            .transpose()
    };
    let xcol = need(&plot.x)?;
    let x_num = xcol.as_f64();
    let x_text = xcol.cells();
    let y = need(&plot.y)?
        .as_f64()
        .ok_or_else(|| format!("column `{}` is not numeric", plot.y))?;
    if x_num.is_none() && plot.kind != PlotKind::Bar {
        return Err(format!("column `{}` is not numeric", plot.x));
    }
    let facets = labels(&plot.facet)?;
    let series = labels(&plot.series)?;

    let mut panels: Vec<Panel> = Vec::new();
    for row in 0..ds.rows() {
        let facet = facets.as_ref().map(|f| f[row].clone());
        let pi = match panels.iter().position(|p| p.label == facet) {
            Some(i) => i,
            None => {
                panels.push(Panel {
                    label: facet,
                    series: Vec::new(),
                });
                panels.len() - 1
            }
        };
        let label = series.as_ref().map(|s| s[row].clone());
        let panel = &mut panels[pi];
        let si = match panel.series.iter().position(|s| s.label == label) {
            Some(i) => i,
            None => {
                panel.series.push(Series {
                    label,
                    x: Vec::new(),
                    y: Vec::new(),
                    categories: Vec::new(),
                });
                panel.series.len() - 1
            }
        };
        let s = &mut panel.series[si];
        s.x.push(x_num.as_ref().map_or(row as f64, |x| x[row]));
        s.y.push(y[row]);
        s.categories.push(x_text[row].clone());
    }
    if panels.is_empty() {
        panels.push(Panel {
            label: None,
            series: Vec::new(),
        });
    }
    Ok(panels)
}

fn polar(svg: &mut String, panel: &Panel, plot: &PlotSpec) -> f64 {
    let cx = POLAR_SIZE / 2.0;
    let cy = POLAR_SIZE / 2.0 + 10.0;
    let peak = panel
        .series
        .iter()
        .flat_map(|s| s.y.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0_f64, f64::max);
    let r_max = ((peak * 10.0).ceil() / 10.0).max(0.1);
    let scale = POLAR_RADIUS / r_max;

    for k in 1..=4 {
        let r = POLAR_RADIUS * k as f64 / 4.0;
        writeln!(
            svg,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.2}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"0.8\"/>"
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" {FONT} fill=\"#666666\">{}</text>",
            cx + 3.0,
            cy - r - 2.0,
            format_significant(r_max * k as f64 / 4.0, 4)
        )
        .unwrap();
    }
    for deg in (0..360).step_by(30) {
        let a = (deg as f64).to_radians();
        let (ex, ey) = (cx + POLAR_RADIUS * a.sin(), cy - POLAR_RADIUS * a.cos());
        writeln!(
            svg,
            "<line x1=\"{cx:.2}\" y1=\"{cy:.2}\" x2=\"{ex:.2}\" y2=\"{ey:.2}\" stroke=\"#dddddd\" stroke-width=\"0.8\"/>"
        )
        .unwrap();
        let shown = if deg <= 180 { deg } else { 360 - deg };
        let (lx, ly) = (cx + (POLAR_RADIUS + 14.0) * a.sin(), cy - (POLAR_RADIUS + 14.0) * a.cos() + 4.0);
        writeln!(
            svg,
            "<text x=\"{lx:.2}\" y=\"{ly:.2}\" text-anchor=\"middle\" {FONT}>{shown}°</text>"
        )
        .unwrap();
    }
    writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" {FONT}>{}</text>",
        POLAR_SIZE - 8.0,
        POLAR_SIZE + 4.0,
        escape(&format!("r: {}, angle: {}", plot.y_label, plot.x_label))
    )
    .unwrap();

    for (i, s) in panel.series.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = s
            .x
            .iter()
            .zip(&s.y)
            .filter(|(t, v)| t.is_finite() && v.is_finite())
            .map(|(&t, &v)| (t.to_radians(), v.max(0.0) * scale))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let right = pts.iter().map(|&(a, r)| (cx + r * a.sin(), cy - r * a.cos()));
        let left = pts.iter().rev().map(|&(a, r)| (cx - r * a.sin(), cy - r * a.cos()));
        let path: Vec<String> = right.chain(left).map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        writeln!(
            svg,
            "<polygon points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            path.join(" "),
            PALETTE[i % PALETTE.len()]
        )
        .unwrap();
    }
    r_max
}

struct Frame {
    x_lo: f64,
    x_hi: f64,
    y_lo: f64,
    y_hi: f64,
    x_ticks: Vec<f64>,
    y_ticks: Vec<f64>,
    log_y: bool,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        let w = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        MARGIN_LEFT + w * (x - self.x_lo) / (self.x_hi - self.x_lo)
    }

    fn py(&self, y: f64) -> f64 {
        let h = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let t = if self.log_y {
            (y.max(self.y_lo).log10() - self.y_lo.log10()) / (self.y_hi.log10() - self.y_lo.log10())
        } else {
            (y - self.y_lo) / (self.y_hi - self.y_lo)
        };
        MARGIN_TOP + h * (1.0 - t)
    }
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= 0.0 {
        let pad = if lo == 0.0 { 1.0 } else { lo.abs() * 0.1 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}

/// Round tick values (steps of 1, 2 or 5 times a power of ten) covering
/// [lo, hi] with about five intervals.
fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).floor() as i64;
    let last = (hi / step).ceil() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn frame_for(panel: &Panel, plot: &PlotSpec, categorical: bool) -> Frame {
    let (x_lo, x_hi, x_ticks) = if categorical {
        let n = panel.series.iter().map(|s| s.x.len()).max().unwrap_or(1);
        (-0.5, n as f64 - 0.5, Vec::new())
    } else {
        let (lo, hi) = range(panel.series.iter().flat_map(|s| s.x.iter().copied()));
        let ticks = nice_ticks(lo, hi);
        (lo, hi, ticks.into_iter().filter(|&t| t >= lo - 1e-9 * (hi - lo) && t <= hi + 1e-9 * (hi - lo)).collect())
    };
    let ys = || panel.series.iter().flat_map(|s| s.y.iter().copied());
    let (y_lo, y_hi, y_ticks) = if plot.log_y {
        let (lo, hi) = range(ys().filter(|&v| v > 0.0));
        let lo = if lo > 0.0 { lo.log10().floor() as i32 } else { -300 };
        let hi = (hi.log10().ceil() as i32).max(lo + 1);
        let ticks = (lo..=hi).map(|e| 10f64.powi(e)).collect();
        (10f64.powi(lo), 10f64.powi(hi), ticks)
    } else {
        let (lo, hi) = range(ys());
        let ticks = nice_ticks(lo.min(0.0), hi);
        (ticks[0], ticks[ticks.len() - 1], ticks)
    };
    Frame {
        x_lo,
        x_hi,
        y_lo,
        y_hi,
        x_ticks,
        y_ticks,
        log_y: plot.log_y,
    }
}

fn axes(svg: &mut String, f: &Frame, plot: &PlotSpec) {
    let (l, r) = (MARGIN_LEFT, PANEL_WIDTH - MARGIN_RIGHT);
    let (t, b) = (MARGIN_TOP, PANEL_HEIGHT - MARGIN_BOTTOM);
    writeln!(
        svg,
        "<rect x=\"{l:.2}\" y=\"{t:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>",
        r - l,
        b - t
    )
    .unwrap();
    for &yv in &f.y_ticks {
        let py = f.py(yv);
        writeln!(svg, "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{l:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>", l - 4.0).unwrap();
        writeln!(
            svg,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" {FONT}>{}</text>",
            l - 6.0,
            py + 4.0,
            format_significant(yv, 6)
        )
        .unwrap();
    }
    for &xv in &f.x_ticks {
        let px = f.px(xv);
        writeln!(svg, "<line x1=\"{px:.2}\" y1=\"{b:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>", b + 4.0).unwrap();
        writeln!(
            svg,
            "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{}</text>",
            b + 16.0,
            format_significant(xv, 6)
        )
        .unwrap();
    }
    writeln!(
        svg,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" {FONT}>{}</text>",
        (l + r) / 2.0,
        PANEL_HEIGHT - 8.0,
        escape(&plot.x_label)
    )
    .unwrap();
    writeln!(
        svg,
        "<text x=\"14\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {:.2})\" {FONT}>{}</text>",
        (t + b) / 2.0,
        (t + b) / 2.0,
        escape(&plot.y_label)
    )
    .unwrap();
}

fn line(svg: &mut String, panel: &Panel, plot: &PlotSpec) {
    let f = frame_for(panel, plot, false);
    axes(svg, &f, plot);
    for (i, s) in panel.series.iter().enumerate() {
        let pts: Vec<String> = s
            .x
            .iter()
            .zip(&s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!f.log_y || **y > 0.0))
            .map(|(&x, &y)| format!("{:.2},{:.2}", f.px(x), f.py(y)))
            .collect();
        writeln!(
            svg,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.2\"/>",
            pts.join(" "),
            PALETTE[i % PALETTE.len()]
        )
        .unwrap();
    }
}

fn bars(svg: &mut String, panel: &Panel, plot: &PlotSpec) {
    let f = frame_for(panel, plot, true);
    axes(svg, &f, plot);
    let groups = panel.series.len().max(1) as f64;
    let slot = f.px(1.0) - f.px(0.0);
    let width = 0.8 * slot / groups;
    let base = f.py(if f.log_y { f.y_lo } else { 0.0 });
    for (i, s) in panel.series.iter().enumerate() {
        for (j, &y) in s.y.iter().enumerate() {
            let x = f.px(j as f64) - 0.4 * slot + width * i as f64;
            let top = f.py(y.max(f.y_lo));
            writeln!(
                svg,
                "<rect x=\"{x:.2}\" y=\"{:.2}\" width=\"{width:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                top.min(base),
                (base - top).abs(),
                PALETTE[i % PALETTE.len()]
            )
            .unwrap();
        }
    }
    if let Some(s) = panel.series.first() {
        let y = PANEL_HEIGHT - MARGIN_BOTTOM + 6.0;
        for (j, cat) in s.categories.iter().enumerate() {
            let x = f.px(j as f64);
            writeln!(
                svg,
                "<text x=\"{x:.2}\" y=\"{y:.2}\" text-anchor=\"end\" transform=\"rotate(-60 {x:.2} {y:.2})\" font-family=\"sans-serif\" font-size=\"8\">{}</text>",
                escape(cat)
            )
            .unwrap();
        }
    }
}

fn legend(svg: &mut String, panel: &Panel, top: f64) {
    for (i, s) in panel.series.iter().enumerate() {
        let Some(label) = &s.label else { continue };
        let y = top + 16.0 * i as f64 + 8.0;
        let color = PALETTE[i % PALETTE.len()];
        writeln!(
            svg,
            "<line x1=\"20\" y1=\"{y:.2}\" x2=\"40\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>"
        )
        .unwrap();
        writeln!(
            svg,
            "<text x=\"46\" y=\"{:.2}\" {FONT}>{}</text>",
            y + 4.0,
            escape(label)
        )
        .unwrap();
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
