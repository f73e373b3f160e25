//! Self-contained SVG heatmaps of distance matrices.

use std::fmt::Write as _;
use std::path::Path;

use qfnet::DistanceMatrix;

use crate::error::{PipelineError, Result, Stage};

const CELL: usize = 8;
const MARGIN: usize = 40;
const LEGEND: usize = 140;

/// Viridis anchor colors, interpolated linearly.
const STOPS: [[f64; 3]; 5] = [
    [68.0, 1.0, 84.0],
    [59.0, 82.0, 139.0],
    [33.0, 145.0, 140.0],
    [94.0, 201.0, 98.0],
    [253.0, 231.0, 37.0],
];

fn color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0) * (STOPS.len() - 1) as f64;
    let i = (t.floor() as usize).min(STOPS.len() - 2);
    let f = t - i as f64;
    let c: Vec<u8> = (0..3)
        .map(|k| (STOPS[i][k] + f * (STOPS[i + 1][k] - STOPS[i][k])).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn off_diagonal_range(m: &DistanceMatrix) -> Option<(f64, f64)> {
    let mut range: Option<(f64, f64)> = None;
    for i in 0..m.size {
        for j in 0..m.size {
            if i != j {
                let v = m.values[i][j];
                range = Some(match range {
                    None => (v, v),
                    Some((lo, hi)) => (lo.min(v), hi.max(v)),
                });
            }
        }
    }
    range
}

/// One `rect` per matrix entry, colored on a linear scale spanning the
/// off-diagonal minimum and maximum. Diagonal entries are clamped to that
/// scale. A zero-width range paints every cell the middle color.
pub fn render_heatmap_svg(m: &DistanceMatrix) -> String {
    let n = m.size;
    let grid = n * CELL;
    let width = MARGIN * 2 + grid + LEGEND;
    let height = MARGIN * 2 + grid.max(120);
    let range = off_diagonal_range(m);
    let scale = |v: f64| match range {
        Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
        _ => 0.5,
    };

    let mut s = String::with_capacity(64 * n * n + 1024);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{MARGIN}" y="24" font-family="sans-serif" font-size="14">{}</text>"#,
        escape(m.metric.name.as_str())
    );
    let _ = writeln!(s, r#"<g id="cells" shape-rendering="crispEdges">"#);
    for i in 0..n {
        for j in 0..n {
            let _ = writeln!(
                s,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{}"/>"#,
                MARGIN + j * CELL,
                MARGIN + i * CELL,
                color(scale(m.values[i][j]))
            );
        }
    }
    s.push_str("</g>\n");

    let lx = MARGIN + grid + 20;
    let _ = writeln!(
        s,
        r#"<g id="legend" font-family="sans-serif" font-size="10">"#
    );
    for k in 0..10 {
        let t = 1.0 - k as f64 / 9.0;
        let _ = writeln!(
            s,
            r#"<rect x="{lx}" y="{}" width="14" height="10" fill="{}"/>"#,
            MARGIN + k * 10,
            color(t)
        );
    }
    match range {
        Some((lo, hi)) if hi > lo => {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">max {hi:.6}</text>"#,
                lx + 20,
                MARGIN + 9
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}">min {lo:.6}</text>"#,
                lx + 20,
                MARGIN + 99
            );
            let _ = writeln!(
                s,
                r#"<text x="{lx}" y="{}">linear min-max scale, off-diagonal</text>"#,
                MARGIN + 118
            );
        }
        Some((lo, _)) => {
            let _ = writeln!(
                s,
                r#"<text x="{lx}" y="{}">degenerate scale: all off-diagonal values = {lo:.6}</text>"#,
                MARGIN + 118
            );
        }
        None => {
            let _ = writeln!(
                s,
                r#"<text x="{lx}" y="{}">degenerate scale: no off-diagonal values</text>"#,
                MARGIN + 118
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

pub fn write_heatmap_svg(m: &DistanceMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, render_heatmap_svg(m))
        .map_err(|e| PipelineError::io(Stage::Heatmap, path, e))
}
