//! Chart-coordinate SVG drawings of foliation and dividing-set reports.

use std::fmt::Write;

use super::census::FoliationReport;
use super::dividing::DividingSetReport;
use super::singular::{SingularityKind, SingularitySign};

const SIZE: f64 = 480.0;
const PAD: f64 = 10.0;

fn map(q: [f64; 2]) -> (f64, f64) {
    (PAD + q[0] * SIZE, PAD + (1.0 - q[1]) * SIZE)
}

/// Splits an unwrapped polyline where it crosses a periodic edge and
/// reduces each piece into the unit square.
fn pieces(points: &[[f64; 2]], periodic: [bool; 2]) -> Vec<Vec<[f64; 2]>> {
    let cell = |p: [f64; 2]| {
        [0, 1].map(|i| if periodic[i] { p[i].floor() } else { 0.0 })
    };
    let mut out: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut current_cell = None;
    for &p in points {
        let c = cell(p);
        if current_cell != Some(c) {
            out.push(Vec::new());
            current_cell = Some(c);
        }
        if let Some(last) = out.last_mut() {
            last.push([p[0] - c[0], p[1] - c[1]]);
        }
    }
    out.retain(|piece| piece.len() > 1);
    out
}

fn polyline(svg: &mut String, pts: &[[f64; 2]], style: &str) {
    let mut d = String::new();
    for (k, p) in pts.iter().enumerate() {
        let (x, y) = map(*p);
        let _ = write!(d, "{}{:.2},{:.2}", if k == 0 { "M" } else { " L" }, x, y);
    }
    let _ = writeln!(svg, r#"<path d="{d}" {style}/>"#);
}

fn frame(title: &str) -> String {
    let total = SIZE + 2.0 * PAD;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}">"#
    );
    let _ = writeln!(svg, "<title>{title}</title>");
    let _ = writeln!(
        svg,
        r##"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#999"/>"##
    );
    svg
}

pub fn foliation_svg(report: &FoliationReport, periodic: [bool; 2]) -> String {
    let mut svg = frame("characteristic foliation");
    for leaf in &report.sampled_leaves {
        for piece in pieces(&leaf.points, periodic) {
            polyline(&mut svg, &piece, r##"fill="none" stroke="#456" stroke-width="0.8""##);
        }
    }
    for leaf in &report.closed_leaves {
        for piece in pieces(&leaf.points, periodic) {
            polyline(&mut svg, &piece, r##"fill="none" stroke="#c60" stroke-width="2""##);
        }
    }
    for locus in &report.degenerate_loci {
        for q in &locus.chart_points {
            let (x, y) = map(*q);
            let _ = writeln!(svg, r##"<circle cx="{x:.2}" cy="{y:.2}" r="1.5" fill="#808"/>"##);
        }
    }
    for s in &report.singularities {
        let (x, y) = map(s.chart);
        let fill = match s.sign {
            SingularitySign::Positive => "#000",
            SingularitySign::Negative => "#fff",
            SingularitySign::Undetermined => "#888",
        };
        match s.kind {
            SingularityKind::Hyperbolic => {
                let _ = writeln!(
                    svg,
                    r##"<rect x="{:.2}" y="{:.2}" width="8" height="8" fill="{fill}" stroke="#000"/>"##,
                    x - 4.0,
                    y - 4.0
                );
            }
            _ => {
                let _ = writeln!(svg, r##"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{fill}" stroke="#000"/>"##);
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn dividing_svg(report: &DividingSetReport, periodic: [bool; 2]) -> String {
    let mut svg = frame("dividing set");
    for c in &report.gamma {
        for piece in pieces(&c.points, periodic) {
            polyline(
                &mut svg,
                &piece,
                r##"fill="none" stroke="#c00" stroke-width="1.5" stroke-dasharray="4 3""##,
            );
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_pieces_split_at_the_seam() {
        let pts = [[0.8, 0.1], [0.95, 0.1], [1.05, 0.1], [1.2, 0.1]];
        let p = pieces(&pts, [true, false]);
        assert_eq!(p.len(), 2);
        assert!((p[1][0][0] - 0.05).abs() < 1e-12);
        assert_eq!(pieces(&pts, [false, false]).len(), 1);
    }
}
