//! SVG rendering of realized domains.

use std::fmt::Write as _;
use std::path::Path;

use super::PlanarDomain;
use crate::error::Result;
use crate::scalar::Real;
use crate::tiling::side_corners;

/// Stroke pattern for side color `c`: dotted, dashed, solid.
fn dash(c: usize) -> &'static str {
    match c {
        0 => " stroke-dasharray=\"1 3\"",
        1 => " stroke-dasharray=\"6 4\"",
        _ => "",
    }
}

/// Lays the domains out left to right. Tiles are shaded by orientation,
/// glued sides are drawn thin with the color's stroke pattern, the boundary
/// thick, and interior vertices are marked.
pub fn render_svg<R: Real>(domains: &[&PlanarDomain<R>]) -> String {
    let px = 120.0;
    let margin = 0.25;
    let mut offset = 0.0;
    let mut placed = Vec::new();
    let mut height: f64 = 0.0;
    for d in domains {
        let pts: Vec<(f64, f64)> = (0..d.n())
            .flat_map(|t| d.tile_vertices(t))
            .map(|p| (p.x.as_f64(), p.y.as_f64()))
            .collect();
        let xmin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let xmax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let ymin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let ymax = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        placed.push((offset + margin - xmin, ymax + margin));
        offset += xmax - xmin + 2.0 * margin;
        height = height.max(ymax - ymin + 2.0 * margin);
    }
    let (w, h) = (offset * px, height * px);
    let mut out = String::new();
    let _ = writeln!(out, "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.1} {h:.1}\">");
    for (d, (dx, top)) in domains.iter().zip(placed) {
        let map = |p: nalgebra::Point2<R>| ((p.x.as_f64() + dx) * px, (top - p.y.as_f64()) * px);
        let _ = writeln!(out, "<g>");
        for t in 0..d.n() {
            let v = d.tile_vertices(t).map(map);
            let fill = if d.placements[t].reflected { "#d9d9d9" } else { "#f7f7f7" };
            let _ = writeln!(
                out,
                "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"{fill}\" stroke=\"none\"/>",
                v[0].0, v[0].1, v[1].0, v[1].1, v[2].0, v[2].1
            );
            for c in 0..3 {
                let boundary = d.neighbors[t][c].is_none();
                if !boundary && d.neighbors[t][c] < Some(t) {
                    continue;
                }
                let [i, j] = side_corners(c);
                let width = if boundary { 2.5 } else { 1.0 };
                let _ = writeln!(
                    out,
                    "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"{width}\"{}/>",
                    v[i].0,
                    v[i].1,
                    v[j].0,
                    v[j].1,
                    dash(c)
                );
            }
            let cx = (v[0].0 + v[1].0 + v[2].0) / 3.0;
            let cy = (v[0].1 + v[1].1 + v[2].1) / 3.0;
            let _ = writeln!(
                out,
                "<text x=\"{cx:.2}\" y=\"{cy:.2}\" font-size=\"12\" text-anchor=\"middle\" dominant-baseline=\"middle\">{t}</text>"
            );
        }
        for p in &d.special_points {
            let (x, y) = map(*p);
            let _ = writeln!(out, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"crimson\"/>");
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    out
}

pub fn export_svg<R: Real>(domains: &[&PlanarDomain<R>], path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(domains))?;
    Ok(())
}
