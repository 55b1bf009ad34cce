//! Minimal SVG output: polylines and heat grids, with the canonical run
//! configuration embedded as a comment.  No plotting library is involved;
//! the files are meant for quick inspection and as scaffolding for figures.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bozd::config::RunConfig;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

/// One polyline; `style` indexes the colour palette, `dashed` draws it dashed.
pub struct Polyline {
    pub points: Vec<(f64, f64)>,
    pub style: usize,
    pub dashed: bool,
}

/// Axis labels and title.
pub struct Labels<'a> {
    pub title: &'a str,
    pub x: &'a str,
    pub y: &'a str,
}

/// Maps data coordinates to the canvas (y pointing up).
struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn fit<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> Self {
        let mut f = Frame { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY };
        for &(x, y) in points.filter(|p| p.0.is_finite() && p.1.is_finite()) {
            f.x0 = f.x0.min(x);
            f.x1 = f.x1.max(x);
            f.y0 = f.y0.min(y);
            f.y1 = f.y1.max(y);
        }
        if !f.x0.is_finite() {
            (f.x0, f.x1, f.y0, f.y1) = (0.0, 1.0, 0.0, 1.0);
        }
        if f.x1 <= f.x0 {
            (f.x0, f.x1) = (f.x0 - 0.5, f.x0 + 0.5);
        }
        if f.y1 <= f.y0 {
            (f.y0, f.y1) = (f.y0 - 0.5, f.y0 + 0.5);
        }
        f
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn begin(cfg: &RunConfig, labels: &Labels, frame: &Frame) -> String {
    let mut s = String::new();
    // `--` may not appear inside an XML comment.
    let config = cfg.canonical().replace("--", "- -");
    let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
    let _ = writeln!(s, "<!-- bozd {}\n{config}-->", cfg.subcommand);
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(s, "<text x=\"{}\" y=\"20\" text-anchor=\"middle\">{}</text>", WIDTH / 2.0, escape(labels.title));
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
        WIDTH / 2.0,
        HEIGHT - 10.0,
        escape(labels.x)
    );
    let _ = writeln!(
        s,
        "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {})\">{}</text>",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(labels.y)
    );
    let (l, r, b, t) = (frame.px(frame.x0), frame.px(frame.x1), frame.py(frame.y0), frame.py(frame.y1));
    let _ = writeln!(s, "<rect x=\"{l:.2}\" y=\"{t:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>", r - l, b - t);
    for (v, x, anchor) in [(frame.x0, l, "start"), (frame.x1, r, "end")] {
        let _ = writeln!(s, "<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"{anchor}\">{}</text>", b + 15.0, tick(v));
    }
    for (v, y) in [(frame.y0, b), (frame.y1, t + 10.0)] {
        let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{y:.2}\" text-anchor=\"end\">{}</text>", l - 4.0, tick(v));
    }
    s
}

fn tick(v: f64) -> String {
    format!("{v:.4}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn finish(dir: &Path, name: &str, mut s: String) -> Result<PathBuf> {
    s.push_str("</svg>\n");
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Writes polylines; non-finite points split a line.
pub fn polylines(dir: &Path, name: &str, cfg: &RunConfig, labels: &Labels, lines: &[Polyline]) -> Result<PathBuf> {
    let frame = Frame::fit(lines.iter().flat_map(|l| l.points.iter()));
    let mut s = begin(cfg, labels, &frame);
    for line in lines {
        let colour = PALETTE[line.style % PALETTE.len()];
        let dash = if line.dashed { " stroke-dasharray=\"5,3\"" } else { "" };
        for run in line.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
            if run.len() < 2 {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", frame.px(x), frame.py(y))).collect();
            let _ = writeln!(
                s,
                "<polyline fill=\"none\" stroke=\"{colour}\" stroke-width=\"1.2\"{dash} points=\"{}\"/>",
                pts.join(" ")
            );
        }
    }
    finish(dir, name, s)
}

/// Writes a heat grid of `(x, y, value)` samples on a rectangular lattice
/// (blue low, red high; NaN cells are left grey).
pub fn heat_grid(dir: &Path, name: &str, cfg: &RunConfig, labels: &Labels, cells: &[(f64, f64, f64)]) -> Result<PathBuf> {
    let mut xs: Vec<f64> = cells.iter().map(|c| c.0).collect();
    let mut ys: Vec<f64> = cells.iter().map(|c| c.1).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let frame = Frame::fit(cells.iter().map(|c| (c.0, c.1)).collect::<Vec<_>>().iter());
    let mut s = begin(cfg, labels, &frame);
    let (lo, hi) = cells
        .iter()
        .map(|c| c.2)
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let step = |v: &[f64]| if v.len() > 1 { (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64 } else { 1.0 };
    let (dx, dy) = (step(&xs), step(&ys));
    let w = (frame.px(frame.x0 + dx) - frame.px(frame.x0)).abs().max(0.5);
    let h = (frame.py(frame.y0) - frame.py(frame.y0 + dy)).abs().max(0.5);
    for &(x, y, v) in cells {
        let fill = if v.is_finite() && hi > lo {
            let a = (v - lo) / (hi - lo);
            format!("rgb({},{},{})", (255.0 * a) as u8, (80.0 * (1.0 - (2.0 * a - 1.0).abs())) as u8, (255.0 * (1.0 - a)) as u8)
        } else {
            "#bbbbbb".to_string()
        };
        let _ = writeln!(
            s,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"{fill}\"/>",
            frame.px(x) - w / 2.0,
            frame.py(y) - h / 2.0
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"38\" text-anchor=\"middle\">blue {} .. red {}</text>",
        WIDTH / 2.0,
        tick(lo),
        tick(hi)
    );
    finish(dir, name, s)
}
