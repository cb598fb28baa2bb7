//! Self-contained SVG line plots and heatmaps.

use std::fmt::Write;

use sqzc_core::fock::WignerGrid;

use crate::config::PlotQuantity;
use crate::error::CliError;
use crate::sweep::{PointResult, SweepResult};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];
const VIRIDIS: [(f64, f64, f64); 5] =
    [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Samples on a regular grid, `values[j][i]` at `(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.4}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let nice = if f < 1.5 {
        1.0
    } else if f < 3.0 {
        2.0
    } else if f < 7.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = nice_step(hi - lo, 5);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

/// Widens a degenerate range so that it can be drawn.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo > 1e-12 * lo.abs().max(hi.abs()).max(1e-300) {
        return (lo, hi);
    }
    let pad = if lo == 0.0 { 0.5 } else { 0.05 * lo.abs() };
    (lo - pad, hi + pad)
}

fn finite_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.filter(|v| v.is_finite()).fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

pub fn color(t: f64) -> String {
    if !t.is_finite() {
        return "#bbbbbb".into();
    }
    let t = t.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let k = (t.floor() as usize).min(VIRIDIS.len() - 2);
    let f = t - k as f64;
    let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
    let mix = |u: f64, v: f64| (u + f * (v - u)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

struct Frame {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: (f64, f64),
    yr: (f64, f64),
}

impl Frame {
    fn sx(&self, x: f64) -> f64 {
        self.x0 + (x - self.xr.0) / (self.xr.1 - self.xr.0) * self.w
    }

    fn sy(&self, y: f64) -> f64 {
        self.y0 + self.h - (y - self.yr.0) / (self.yr.1 - self.yr.0) * self.h
    }

    fn axes(&self, out: &mut String, title: &str, x_label: &str, y_label: &str) {
        let (x0, y0, w, h) = (self.x0, self.y0, self.w, self.h);
        let _ = writeln!(out, r#"<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="black"/>"#);
        for t in ticks(self.xr.0, self.xr.1) {
            let x = self.sx(t);
            let _ = writeln!(out, r#"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="black"/>"#, y0 + h, y0 + h + 5.0);
            let _ = writeln!(out, r#"<text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"#, y0 + h + 20.0, fmt_tick(t));
        }
        for t in ticks(self.yr.0, self.yr.1) {
            let y = self.sy(t);
            let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{x0}" y2="{y:.2}" stroke="black"/>"#, x0 - 5.0);
            let _ = writeln!(out, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 8.0, y + 4.0, fmt_tick(t));
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, x0 + w / 2.0, HEIGHT - 15.0, escape(x_label));
        let (lx, ly) = (20.0, y0 + h / 2.0);
        let _ = writeln!(out, r#"<text x="{lx}" y="{ly}" text-anchor="middle" transform="rotate(-90 {lx} {ly})">{}</text>"#, escape(y_label));
        let _ = writeln!(out, r#"<text x="{}" y="24" text-anchor="middle" font-weight="bold">{}</text>"#, x0 + w / 2.0, escape(title));
    }
}

fn open() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], reference: Option<f64>) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let xr = padded_or_unit(finite_range(all().map(|p| p.0)));
    let yr = finite_range(all().map(|p| p.1).chain(reference));
    let yr = padded_or_unit(yr.map(|(lo, hi)| {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    }));
    let f = Frame { x0: LEFT, y0: TOP, w: WIDTH - LEFT - 150.0, h: HEIGHT - TOP - BOTTOM, xr, yr };
    let mut out = open();
    f.axes(&mut out, title, x_label, y_label);
    if let Some(r) = reference {
        let y = f.sy(r);
        let _ = writeln!(out, r#"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="black" stroke-dasharray="6,4"/>"#, f.x0, f.x0 + f.w);
    }
    for (k, s) in series.iter().enumerate() {
        let c = PALETTE[k % PALETTE.len()];
        let mut segments: Vec<Vec<(f64, f64)>> = vec![vec![]];
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                segments.last_mut().expect("non-empty").push((f.sx(x), f.sy(y)));
            } else if !segments.last().expect("non-empty").is_empty() {
                segments.push(vec![]);
            }
        }
        for seg in segments.iter().filter(|s| !s.is_empty()) {
            let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{c}" stroke-width="1.5"/>"#, pts.join(" "));
            for (x, y) in seg {
                let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{c}"/>"#);
            }
        }
        let ly = TOP + 10.0 + 18.0 * k as f64;
        let lx = f.x0 + f.w + 15.0;
        let _ = writeln!(out, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{c}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(out, r#"<text x="{}" y="{}">{}</text>"#, lx + 25.0, ly + 4.0, escape(&s.label));
    }
    out.push_str("</svg>\n");
    out
}

fn padded_or_unit(r: Option<(f64, f64)>) -> (f64, f64) {
    let (lo, hi) = r.unwrap_or((0.0, 1.0));
    padded(lo, hi)
}

fn cell_range(v: &[f64]) -> (f64, f64) {
    match v {
        [] => (0.0, 1.0),
        [x] => padded(*x, *x),
        _ => {
            let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64 / 2.0;
            (v[0] - h, v[v.len() - 1] + h)
        }
    }
}

/// Color range of a heatmap: `[min, max]` of the finite values, padded when
/// the field is constant.
pub fn color_range(field: &Field) -> (f64, f64) {
    padded_or_unit(finite_range(field.values.iter().flatten().copied()))
}

pub fn heatmap(title: &str, x_label: &str, y_label: &str, value_label: &str, field: &Field) -> String {
    let (nx, ny) = (field.xs.len(), field.ys.len());
    let f = Frame { x0: LEFT, y0: TOP, w: WIDTH - LEFT - 130.0, h: HEIGHT - TOP - BOTTOM, xr: cell_range(&field.xs), yr: cell_range(&field.ys) };
    let (lo, hi) = color_range(field);
    let mut out = open();
    let (cw, ch) = (f.w / nx.max(1) as f64, f.h / ny.max(1) as f64);
    for j in 0..ny {
        for i in 0..nx {
            let t = (field.values[j][i] - lo) / (hi - lo);
            let (x, y) = (f.x0 + i as f64 * cw, f.y0 + f.h - (j + 1) as f64 * ch);
            let _ = writeln!(out, r#"<rect x="{x:.3}" y="{y:.3}" width="{:.3}" height="{:.3}" fill="{}"/>"#, cw + 0.05, ch + 0.05, color(t));
        }
    }
    f.axes(&mut out, title, x_label, y_label);
    let bar = Frame { x0: f.x0 + f.w + 25.0, y0: f.y0, w: 20.0, h: f.h, xr: (0.0, 1.0), yr: (lo, hi) };
    let steps = 64;
    for k in 0..steps {
        let y = bar.y0 + bar.h * (1.0 - (k + 1) as f64 / steps as f64);
        let _ = writeln!(
            out,
            r#"<rect class="colorbar" x="{}" y="{y:.3}" width="{}" height="{:.3}" fill="{}"/>"#,
            bar.x0,
            bar.w,
            bar.h / steps as f64 + 0.05,
            color((k as f64 + 0.5) / steps as f64)
        );
    }
    let _ = writeln!(out, r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#, bar.x0, bar.y0, bar.w, bar.h);
    for t in ticks(lo, hi) {
        let y = bar.sy(t);
        let _ = writeln!(out, r#"<text x="{}" y="{:.2}">{}</text>"#, bar.x0 + bar.w + 4.0, y + 4.0, fmt_tick(t));
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, bar.x0 + bar.w / 2.0, bar.y0 - 8.0, escape(value_label));
    out.push_str("</svg>\n");
    out
}

pub fn wigner_svg(title: &str, w: &WignerGrid) -> String {
    let field = Field { xs: (0..w.nx).map(|i| w.x(i)).collect(), ys: (0..w.np).map(|j| w.p(j)).collect(), values: w.values.clone() };
    heatmap(title, "x", "p", "W", &field)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tier {
    Gaussian,
    Fock,
}

impl Tier {
    fn name(self) -> &'static str {
        match self {
            Tier::Gaussian => "gaussian",
            Tier::Fock => "fock",
        }
    }
}

fn value(p: &PointResult, tier: Tier, q: PlotQuantity) -> Option<f64> {
    match tier {
        Tier::Gaussian => {
            let g = p.gaussian.as_ref()?;
            let Ok(g) = g else { return Some(f64::NAN) };
            Some(match q {
                PlotQuantity::VarMin => g.var_min,
                PlotQuantity::VarP => g.var_p,
                PlotQuantity::SqueezingDb => g.squeezing_db,
                PlotQuantity::NBar => g.n_bar,
                PlotQuantity::MomentError => return None,
            })
        }
        Tier::Fock => {
            let f = p.fock.as_ref()?;
            let Ok(f) = f else { return Some(f64::NAN) };
            Some(match q {
                PlotQuantity::VarMin => f.var_min,
                PlotQuantity::VarP => f.var_p,
                PlotQuantity::SqueezingDb => f.squeezing_db,
                PlotQuantity::NBar => f.n_bar,
                PlotQuantity::MomentError if f.moment_error_undefined => f64::NAN,
                PlotQuantity::MomentError => f.moment_error,
            })
        }
    }
}

/// Series labels in first-appearance order.
fn series_labels(result: &SweepResult) -> Vec<&str> {
    let mut labels: Vec<&str> = Vec::new();
    for p in &result.points {
        if !labels.contains(&p.spec.series.as_str()) {
            labels.push(&p.spec.series);
        }
    }
    labels
}

/// Plots of a sweep as `(file suffix, svg)`: one line plot with a curve per
/// series and tier for 1-D sweeps, one heatmap per series and tier for 2-D.
/// Single-point runs produce no sweep plot.
pub fn sweep_plots(result: &SweepResult, q: PlotQuantity, reference: Option<f64>, title: &str) -> Result<Vec<(String, String)>, CliError> {
    let labels = series_labels(result);
    let mut curves = Vec::new();
    for &s in &labels {
        let pts: Vec<&PointResult> = result.points.iter().filter(|p| p.spec.series == s).collect();
        for tier in [Tier::Gaussian, Tier::Fock] {
            let vals: Vec<Option<f64>> = pts.iter().map(|p| value(p, tier, q)).collect();
            if vals.iter().all(Option::is_none) {
                continue;
            }
            curves.push((s, tier, pts.clone(), vals));
        }
    }
    match result.axes.len() {
        0 => Ok(vec![]),
        1 => {
            let series = curves
                .into_iter()
                .map(|(s, tier, pts, vals)| Series {
                    label: format!("{s} ({})", tier.name()),
                    points: pts.iter().zip(vals).map(|(p, v)| (p.spec.coords[0], v.unwrap_or(f64::NAN))).collect(),
                })
                .collect::<Vec<_>>();
            Ok(vec![(String::new(), line_plot(title, &result.axes[0], q.label(), &series, reference))])
        }
        2 => {
            let mut out = Vec::new();
            for (s, tier, pts, vals) in curves {
                let mut xs: Vec<f64> = Vec::new();
                let mut ys: Vec<f64> = Vec::new();
                for p in &pts {
                    if !xs.contains(&p.spec.coords[0]) {
                        xs.push(p.spec.coords[0]);
                    }
                    if !ys.contains(&p.spec.coords[1]) {
                        ys.push(p.spec.coords[1]);
                    }
                }
                let mut values = vec![vec![f64::NAN; xs.len()]; ys.len()];
                for (p, v) in pts.iter().zip(vals) {
                    let i = xs.iter().position(|&x| x == p.spec.coords[0]).expect("collected");
                    let j = ys.iter().position(|&y| y == p.spec.coords[1]).expect("collected");
                    values[j][i] = v.unwrap_or(f64::NAN);
                }
                let field = Field { xs, ys, values };
                let svg = heatmap(&format!("{title}: {s} ({})", tier.name()), &result.axes[0], &result.axes[1], q.label(), &field);
                out.push((format!("_{s}_{}", tier.name()), svg));
            }
            Ok(out)
        }
        n => Err(CliError::Config(format!("cannot plot a {n}-dimensional sweep; at most 2 axes are supported"))),
    }
}
