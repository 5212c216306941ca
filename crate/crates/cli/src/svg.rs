//! Cuff axes in the Poincaré disk.

use std::collections::BTreeSet;
use std::fmt::Write;

use anyhow::Result;
use foldrep::moebius::{BoundaryPoint, MoebiusTransform};
use foldrep::surface::SurfaceRep;

const SIZE: f64 = 800.0;
const RADIUS: f64 = 380.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Cayley image of a boundary point on the unit circle.
fn to_disk(p: BoundaryPoint) -> (f64, f64) {
    match p {
        BoundaryPoint::Infinity => (1.0, 0.0),
        BoundaryPoint::Finite(x) => {
            let n = x * x + 1.0;
            ((x * x - 1.0) / n, 2.0 * x / n)
        }
    }
}

fn to_canvas((x, y): (f64, f64)) -> (f64, f64) {
    (SIZE / 2.0 + RADIUS * x, SIZE / 2.0 - RADIUS * y)
}

/// SVG path of the geodesic joining two points of the unit circle.
fn geodesic_path(p: (f64, f64), q: (f64, f64)) -> String {
    let (px, py) = to_canvas(p);
    let (qx, qy) = to_canvas(q);
    let dot = (p.0 * q.0 + p.1 * q.1).clamp(-1.0, 1.0);
    let delta = dot.acos();
    if (std::f64::consts::PI - delta).abs() < 1e-6 {
        return format!("M {px:.3} {py:.3} L {qx:.3} {qy:.3}");
    }
    let r = RADIUS * (delta / 2.0).tan();
    let sec = 1.0 / (delta / 2.0).cos();
    let (mx, my) = ((p.0 + q.0) / 2.0, (p.1 + q.1) / 2.0);
    let norm = (mx * mx + my * my).sqrt();
    let (cx, cy) = to_canvas((mx / norm * sec, my / norm * sec));
    let cross = (px - cx) * (qy - cy) - (py - cy) * (qx - cx);
    let sweep = u8::from(cross > 0.0);
    format!("M {px:.3} {py:.3} A {r:.3} {r:.3} 0 0 {sweep} {qx:.3} {qy:.3}")
}

/// Reduced products of the generators up to `depth` letters.
fn conjugators(gens: &[MoebiusTransform], depth: usize) -> Vec<MoebiusTransform> {
    let letters: Vec<MoebiusTransform> = gens.iter().flat_map(|g| [*g, g.inverse()]).collect();
    let mut out = vec![MoebiusTransform::IDENTITY];
    let mut frontier: Vec<(MoebiusTransform, Option<usize>)> = vec![(MoebiusTransform::IDENTITY, None)];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (w, last) in &frontier {
            for (i, l) in letters.iter().enumerate() {
                if last.is_some_and(|j| j ^ 1 == i) {
                    continue;
                }
                let g = w.compose(l);
                out.push(g);
                next.push((g, Some(i)));
            }
        }
        frontier = next;
    }
    out
}

/// SVG drawing of every cuff axis and its translates by short words.
pub fn cuff_axes(rep: &SurfaceRep, depth: usize) -> Result<String> {
    let words = conjugators(rep.generators(), depth);
    let mut svg = String::new();
    writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#)?;
    writeln!(
        svg,
        r#"<circle cx="{c}" cy="{c}" r="{RADIUS}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        c = SIZE / 2.0
    )?;
    let mut seen = BTreeSet::new();
    for cuff in 0..rep.decomposition().cuff_count() {
        let (p, q) = rep.cuff_holonomy(cuff)?.fixed_points()?;
        let colour = PALETTE[cuff % PALETTE.len()];
        for w in &words {
            let (a, b) = (to_disk(w.apply_boundary(p)), to_disk(w.apply_boundary(q)));
            let key = {
                let ka = ((a.0 * 1e6).round() as i64, (a.1 * 1e6).round() as i64);
                let kb = ((b.0 * 1e6).round() as i64, (b.1 * 1e6).round() as i64);
                (ka.min(kb), ka.max(kb))
            };
            if key.0 == key.1 || !seen.insert(key) {
                continue;
            }
            writeln!(
                svg,
                r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="1"/>"#,
                geodesic_path(a, b)
            )?;
        }
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
