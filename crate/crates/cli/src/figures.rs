//! Hand-written SVG figures.
//!
//! Every figure is a pure function of rows parsed from the CSV outputs, so
//! `analyze` can regenerate byte-identical files from a results directory.

use std::fmt::Write;

use lipm_gait::sim::phase_portrait_from;
use lipm_gait::{Sample, StepRecord};

use crate::output::{StepRow, TraceRow};

pub const FIG_COM: &str = "fig2_com.svg";
pub const FIG_PHASE: &str = "fig3_phase.svg";
pub const FIG_STEPS: &str = "fig4_steplen.svg";

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        self.left + (x - self.x.0) / (self.x.1 - self.x.0) * self.width
    }

    fn py(&self, y: f64) -> f64 {
        self.top + self.height - (y - self.y.0) / (self.y.1 - self.y.0) * self.height
    }
}

struct Svg {
    buf: String,
}

impl Svg {
    fn new(width: u32, height: u32) -> Self {
        let mut buf = String::new();
        let _ = writeln!(
            buf,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(buf, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
        Self { buf }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), stroke: &str, width: f64, dash: bool) {
        let dash = if dash { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.buf,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="{width}"{dash}/>"#,
            a.0, a.1, b.0, b.1
        );
    }

    fn polyline(&mut self, f: &Frame, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, f.px(x), f.py(y));
        }
        let _ = writeln!(
            self.buf,
            r#"<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-linejoin="round"/>"#
        );
    }

    fn marker(&mut self, f: &Frame, p: (f64, f64), fill: &str) {
        let _ = writeln!(
            self.buf,
            r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{fill}"/>"#,
            f.px(p.0),
            f.py(p.1)
        );
    }

    fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(
            self.buf,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"/>"#
        );
    }

    fn text(&mut self, x: f64, y: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.buf,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    fn vtext(&mut self, x: f64, y: f64, s: &str) {
        let _ = writeln!(
            self.buf,
            r#"<text x="{x:.2}" y="{y:.2}" text-anchor="middle" transform="rotate(-90 {x:.2} {y:.2})">{}</text>"#,
            escape(s)
        );
    }

    fn axes(&mut self, f: &Frame, title: &str, xlabel: &str, ylabel: &str) {
        let (l, t, w, h) = (f.left, f.top, f.width, f.height);
        for x in ticks(f.x.0, f.x.1) {
            let px = f.px(x);
            self.line((px, t), (px, t + h), "#e0e0e0", 1.0, false);
            self.text(px, t + h + 15.0, "middle", &tick_label(x, f.x));
        }
        for y in ticks(f.y.0, f.y.1) {
            let py = f.py(y);
            self.line((l, py), (l + w, py), "#e0e0e0", 1.0, false);
            self.text(l - 6.0, py + 4.0, "end", &tick_label(y, f.y));
        }
        let _ = writeln!(
            self.buf,
            r#"<rect x="{l:.2}" y="{t:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="black"/>"#
        );
        self.text(l + w / 2.0, t - 8.0, "middle", title);
        self.text(l + w / 2.0, t + h + 34.0, "middle", xlabel);
        self.vtext(l - 50.0, t + h / 2.0, ylabel);
    }

    fn legend(&mut self, x: f64, y: f64, entries: &[(&str, String)]) {
        for (i, (color, label)) in entries.iter().enumerate() {
            let yy = y + 16.0 * i as f64;
            self.line((x, yy), (x + 20.0, yy), color, 2.0, false);
            self.text(x + 26.0, yy + 4.0, "start", label);
        }
    }

    fn finish(mut self) -> String {
        self.buf.push_str("</svg>\n");
        self.buf
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_step(lo: f64, hi: f64) -> f64 {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(lo, hi);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, range: (f64, f64)) -> String {
    let step = tick_step(range.0, range.1);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        format!("{:.decimals$}", 0.0)
    } else {
        s
    }
}

/// Data range padded by 5 % on each side, never degenerate.
fn span(values: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.into_iter().filter(|v| v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let pad = if hi - lo > 1e-9 * (1.0 + lo.abs().max(hi.abs())) {
        0.05 * (hi - lo)
    } else {
        0.05 * (1.0 + lo.abs())
    };
    (lo - pad, hi + pad)
}

fn records(steps: &[StepRow]) -> Vec<StepRecord> {
    steps.iter().map(StepRow::to_record).collect()
}

/// COM and COP positions over time (top) and COM velocity (bottom).
/// Pushed steps are shaded.
pub fn com_figure(trace: &[TraceRow], steps: &[StepRow]) -> String {
    let mut svg = Svg::new(820, 620);
    let tr = span(trace.iter().map(|r| r.t));
    let top = Frame {
        left: 80.0,
        top: 40.0,
        width: 700.0,
        height: 220.0,
        x: tr,
        y: span(trace.iter().flat_map(|r| [r.x_world, r.cop_world])),
    };
    let bottom = Frame {
        top: 340.0,
        y: span(trace.iter().map(|r| r.xdot)),
        ..top
    };
    for f in [&top, &bottom] {
        for s in steps.iter().filter(|s| s.pushed) {
            let (a, b) = (f.px(s.t_start.max(tr.0)), f.px(s.t_end.min(tr.1)));
            svg.rect(a, f.top, b - a, f.height, "#fde8d0");
        }
    }
    svg.axes(&top, "COM and COP position", "t [s]", "x [m]");
    svg.axes(&bottom, "COM velocity", "t [s]", "ẋ [m/s]");
    let com: Vec<_> = trace.iter().map(|r| (r.t, r.x_world)).collect();
    let cop: Vec<_> = trace.iter().map(|r| (r.t, r.cop_world)).collect();
    let vel: Vec<_> = trace.iter().map(|r| (r.t, r.xdot)).collect();
    svg.polyline(&top, &cop, PALETTE[3], 1.5);
    svg.polyline(&top, &com, PALETTE[0], 1.5);
    svg.polyline(&bottom, &vel, PALETTE[0], 1.5);
    svg.legend(
        top.left + 10.0,
        top.top + 14.0,
        &[(PALETTE[0], "COM".into()), (PALETTE[3], "COP".into())],
    );
    svg.finish()
}

/// Phase portrait of `(x, ẋ)` relative to the stance foot. Support
/// exchanges are dashed; the last step's arc is drawn heavier.
pub fn phase_figure(trace: &[TraceRow], steps: &[StepRow]) -> String {
    let samples: Vec<Sample> = trace.iter().map(Sample::from).collect();
    let portrait = phase_portrait_from(&records(steps), &samples);
    let mut svg = Svg::new(700, 560);
    let f = Frame {
        left: 80.0,
        top: 40.0,
        width: 580.0,
        height: 440.0,
        x: span(portrait.points.iter().map(|p| p.0)),
        y: span(portrait.points.iter().map(|p| p.1)),
    };
    svg.axes(&f, "Phase portrait", "x [m]", "ẋ [m/s]");
    for &i in &portrait.resets {
        if let (Some(&a), Some(&b)) = (portrait.points.get(i), portrait.points.get(i + 1)) {
            svg.line((f.px(a.0), f.py(a.1)), (f.px(b.0), f.py(b.1)), "#888888", 1.0, true);
        }
    }
    let last = portrait.arcs.len().saturating_sub(1);
    for (k, &(a, b)) in portrait.arcs.iter().enumerate() {
        let (color, width) = if k == last { ("#000000", 3.0) } else { (PALETTE[0], 1.2) };
        svg.polyline(&f, &portrait.points[a..=b], color, width);
    }
    svg.legend(
        f.left + 10.0,
        f.top + f.height - 30.0,
        &[(PALETTE[0], "steps".into()), ("#000000", "last step".into())],
    );
    svg.finish()
}

/// Applied step length against step index, one series per run.
pub fn step_length_figure(series: &[(String, Vec<StepRow>)]) -> String {
    let mut svg = Svg::new(820, 460);
    let f = Frame {
        left: 80.0,
        top: 40.0,
        width: 700.0,
        height: 340.0,
        x: span(series.iter().flat_map(|(_, s)| s.iter().map(|r| r.index as f64))),
        y: span(series.iter().flat_map(|(_, s)| s.iter().map(|r| r.l_applied))),
    };
    svg.axes(&f, "Step length", "step", "L [m]");
    for (k, (_, rows)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<_> = rows.iter().map(|r| (r.index as f64, r.l_applied)).collect();
        svg.polyline(&f, &pts, color, 1.5);
        for &p in &pts {
            svg.marker(&f, p, color);
        }
        for r in rows.iter().filter(|r| r.pushed) {
            let x = f.px(r.index as f64);
            svg.line((x, f.top), (x, f.top + f.height), "#bbbbbb", 1.0, true);
        }
    }
    let entries: Vec<_> = series
        .iter()
        .enumerate()
        .map(|(k, (label, _))| (PALETTE[k % PALETTE.len()], label.clone()))
        .collect();
    svg.legend(f.left + f.width - 140.0, f.top + 14.0, &entries);
    svg.finish()
}
