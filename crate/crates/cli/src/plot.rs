//! Static SVG figures: convergence panels and multi-objective scatter plots.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use log::warn;
use obfevo_core::evolution::RunTrace;
use obfevo_core::metrics::median;
use obfevo_core::{MetricKind, ProblemKind};

use crate::analyze::MetricKey;
use crate::store::{self, MetricRow, StoredConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PlotKind {
    Convergence,
    Scatter,
    All,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= target as f64).unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v.abs() >= 1e5 || (v != 0.0 && v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

/// A single chart with linear axes.
struct Chart {
    x: (f64, f64),
    y: (f64, f64),
    body: String,
}

impl Chart {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| if hi > lo { (lo, hi) } else { (lo - 1.0, hi + 1.0) };
        Self { x: pad(x), y: pad(y), body: String::new() }
    }

    fn px(&self, v: f64) -> f64 {
        LEFT + (v - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - TOP - BOTTOM)
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, opacity: f64) {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y))).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{stroke}" stroke-width="{width}" stroke-opacity="{opacity}" points="{}"/>"#,
            coords.join(" ")
        );
    }

    fn points(&mut self, pts: &[(f64, f64)], fill: &str, r: f64) {
        for &(x, y) in pts {
            let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="{r}" fill="{fill}"/>"#, self.px(x), self.py(y));
        }
    }

    fn render(&self, title: &str, x_label: &str, y_label: &str, legend: &[(&str, &str)]) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
        for t in ticks(self.x.0, self.x.1, 8) {
            let px = self.px(t);
            let _ = writeln!(s, r##"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{y1}" stroke="#eee"/>"##);
            let _ = writeln!(s, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#, y1 + 15.0, fmt_tick(t));
        }
        for t in ticks(self.y.0, self.y.1, 6) {
            let py = self.py(t);
            let _ = writeln!(s, r##"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" stroke="#eee"/>"##);
            let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{}</text>"#, x0 - 5.0, py + 4.0, fmt_tick(t));
        }
        let _ = writeln!(s, r#"<rect x="{x0}" y="{y0}" width="{}" height="{}" fill="none" stroke="black"/>"#, x1 - x0, y1 - y0);
        s.push_str(&self.body);
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, escape(x_label));
        let _ = writeln!(
            s,
            r#"<text transform="translate(16 {}) rotate(-90)" text-anchor="middle">{}</text>"#,
            (y0 + y1) / 2.0,
            escape(y_label)
        );
        for (i, (color, name)) in legend.iter().enumerate() {
            let y = y0 + 14.0 + 16.0 * i as f64;
            let _ = writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{color}"/>"#, x1 - 150.0, y - 9.0);
            let _ = writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, x1 - 135.0, escape(name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn primary_metric(kind: ProblemKind) -> MetricKey {
    match kind {
        ProblemKind::Moap => MetricKey::new(MetricKind::IgdPlus, None, false),
        _ => MetricKey::new(MetricKind::MeanFitness, Some(0), false),
    }
}

fn series(rows: &[MetricRow], key: MetricKey) -> BTreeMap<u64, Vec<(f64, f64)>> {
    let mut out: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for r in rows {
        if r.metric == key.kind && r.objective == key.objective && r.normalized == key.normalized {
            out.entry(r.seed).or_default().push((r.generation as f64, r.value));
        }
    }
    for v in out.values_mut() {
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

/// Every run's curve in grey with the per-generation median on top.
pub fn convergence_svg(title: &str, y_label: &str, runs: &BTreeMap<u64, Vec<(f64, f64)>>) -> String {
    let x = bounds(runs.values().flatten().map(|p| p.0));
    let y = bounds(runs.values().flatten().map(|p| p.1));
    let mut chart = Chart::new(x, y);
    for pts in runs.values() {
        chart.polyline(pts, "#999", 1.0, 0.5);
    }
    let mut by_gen: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for pts in runs.values() {
        for &(g, v) in pts {
            by_gen.entry(g as u64).or_default().push(v);
        }
    }
    let med: Vec<(f64, f64)> = by_gen.iter().filter_map(|(g, v)| median(v).map(|m| (*g as f64, m))).collect();
    chart.polyline(&med, "#c0392b", 2.0, 1.0);
    chart.render(title, "generation", y_label, &[("#999", "individual runs"), ("#c0392b", "median")])
}

/// Found points over the reference front.
pub fn scatter_svg(title: &str, found: &[Vec<f64>], truth: &[Vec<f64>]) -> String {
    let all = || found.iter().chain(truth);
    let mut chart = Chart::new(bounds(all().map(|p| p[0])), bounds(all().map(|p| p[1])));
    chart.points(&truth.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>(), "#bbb", 4.0);
    chart.points(&found.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>(), "#2c6fbb", 3.0);
    chart.render(title, "objective 1", "objective 2", &[("#bbb", "ground truth"), ("#2c6fbb", "estimated non-dominated")])
}

fn missing(configs: &[StoredConfig]) -> Vec<String> {
    configs.iter().filter(|c| !c.dir.join(store::METRICS_FILE).exists()).map(|c| c.info.label.clone()).collect()
}

/// Writes figures for every instance under `root` into `root/plots`.
pub fn plot(root: &Path, kind: PlotKind) -> Result<Vec<PathBuf>> {
    let found = store::discover(root)?;
    if found.is_empty() {
        warn!("no results under {}; nothing to plot", root.display());
        return Ok(Vec::new());
    }
    let absent: Vec<String> =
        found.iter().flat_map(|(i, c)| missing(c).into_iter().map(move |l| format!("{i}/{l}"))).collect();
    if !absent.is_empty() {
        bail!("missing metrics for: {}", absent.join(", "));
    }
    let mut written = Vec::new();
    for (instance, configs) in &found {
        let dir = root.join(store::PLOTS_DIR).join(instance);
        fs::create_dir_all(&dir)?;
        for c in configs {
            let rows = store::read_metrics(&c.dir.join(store::METRICS_FILE))?;
            let key = primary_metric(c.info.kind);
            let runs = series(&rows, key);
            if matches!(kind, PlotKind::Convergence | PlotKind::All) {
                let path = dir.join(format!("convergence_{}.svg", c.info.label));
                let title = format!("{instance}: {}", c.info.label);
                fs::write(&path, convergence_svg(&title, &key.to_string(), &runs))?;
                written.push(path);
            }
            if c.info.kind == ProblemKind::Moap && matches!(kind, PlotKind::Scatter | PlotKind::All) {
                if let Some(path) = scatter_for(&dir, c, &runs)? {
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

/// Scatter of the final result set of the run with the median final IGD⁺.
fn scatter_for(dir: &Path, c: &StoredConfig, runs: &BTreeMap<u64, Vec<(f64, f64)>>) -> Result<Option<PathBuf>> {
    let mut finals: Vec<(f64, u64)> = runs.iter().filter_map(|(s, v)| v.last().map(|p| (p.1, *s))).collect();
    if finals.is_empty() {
        return Ok(None);
    }
    finals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let seed = finals[(finals.len() - 1) / 2].1;
    let trace: RunTrace = store::read_json(&store::trace_path(&c.dir, seed))?;
    let Some(last) = trace.records.last() else { return Ok(None) };
    let found: Vec<Vec<f64>> = last.result_set.iter().map(|m| m.actual.clone()).collect();
    let truth = c.info.ground_truth.clone().unwrap_or_default();
    let path = dir.join(format!("front_{}.svg", c.info.label));
    let title = format!("{}: {} (seed {seed}, generation {})", c.info.instance, c.info.label, last.generation);
    fs::write(&path, scatter_svg(&title, &found, &truth))?;
    Ok(Some(path))
}
