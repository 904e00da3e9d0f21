//! Space curves and drawings of fronts.
//!
//! Event `j` (0-based) occupies `y in [j, j + 1]` and strand `k` sits at
//! `z = -k` between events. Crossings and strand shifts use the quintic
//! smoothstep, cusps the branch `y = y0 + L t^2`, `z = z0 +- h t^3 (5 - 3t^2) / 2`,
//! so `x = -dz/dy` is available in closed form everywhere.

use std::collections::HashMap;
use std::fmt::Write;

use serde::{Serialize, Serializer};

use super::trace::{base_state, Direction, State};
use super::{Event, FrontError, FrontWord, Rule};

const CUSP_LENGTH: f64 = 0.5;
const CUSP_HEIGHT: f64 = 0.5;

fn smoothstep(u: f64) -> (f64, f64, f64) {
    let u2 = u * u;
    let s = u2 * u * (10.0 - 15.0 * u + 6.0 * u2);
    let ds = 30.0 * u2 * (1.0 - u) * (1.0 - u);
    let dds = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u);
    (s, ds, dds)
}

fn strand_z(pos: usize) -> f64 {
    -(pos as f64 + 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Prim {
    /// Graph of `z` over `[y0, y1]` moving from `z0` to `z1`.
    Smooth { y0: f64, y1: f64, z0: f64, z1: f64 },
    /// Cusp branch from the tip (`t = 0`) outwards; `upper` picks the sign of
    /// `z - z0`, `opening` is `+1` for a left cusp and `-1` for a right cusp.
    Branch { tip: [f64; 2], upper: bool, opening: f64 },
}

impl Prim {
    /// Point `(x, y, z)` and derivative with respect to `u`, both in the
    /// rightward sense for smooth pieces and tip-outward for branches.
    fn eval(self, u: f64) -> ([f64; 3], [f64; 3]) {
        match self {
            Prim::Smooth { y0, y1, z0, z1 } => {
                let w = y1 - y0;
                let dz = z1 - z0;
                let (s, ds, dds) = smoothstep(u);
                let x = -dz * ds / w;
                ([x, y0 + w * u, z0 + dz * s], [-dz * dds / w, w, dz * ds])
            }
            Prim::Branch { tip, upper, opening } => {
                let sigma = if upper { 1.0 } else { -1.0 };
                let (l, h) = (CUSP_LENGTH, CUSP_HEIGHT);
                let t = u;
                let g = t * t * t * (5.0 - 3.0 * t * t) / 2.0;
                let dg = 7.5 * t * t * (1.0 - t * t);
                let c = sigma * opening * 15.0 * h / (4.0 * l);
                let x = -c * t * (1.0 - t * t);
                let point = [x, tip[0] + opening * l * t * t, tip[1] + sigma * h * g];
                let tangent = [-c * (1.0 - 3.0 * t * t), 2.0 * opening * l * t, sigma * h * dg];
                (point, tangent)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Side {
    Left,
    Right,
}

/// A strand piece inside one event cell, listed from `from` to `to`.
#[derive(Clone, Debug)]
struct Path {
    from: (Side, usize),
    to: (Side, usize),
    prims: Vec<Prim>,
    over: bool,
}

fn flat(y0: f64, y1: f64, z: f64) -> Prim {
    Prim::Smooth { y0, y1, z0: z, z1: z }
}

fn cell_paths(e: Event, j: usize, n_in: usize) -> Vec<Path> {
    let y = j as f64;
    let mut out = Vec::new();
    let through = |p_in: usize, p_out: usize, prims: Vec<Prim>| Path {
        from: (Side::Left, p_in),
        to: (Side::Right, p_out),
        prims,
        over: false,
    };
    match e {
        Event::Crossing(k) => {
            let k0 = k - 1;
            for p in 0..n_in {
                let q = if p == k0 {
                    k0 + 1
                } else if p == k0 + 1 {
                    k0
                } else {
                    p
                };
                let mut path = through(
                    p,
                    q,
                    vec![Prim::Smooth {
                        y0: y,
                        y1: y + 1.0,
                        z0: strand_z(p),
                        z1: strand_z(q),
                    }],
                );
                path.over = p == k0;
                out.push(path);
            }
        }
        Event::LeftCusp(k) => {
            let k0 = k - 1;
            for p in 0..n_in {
                let q = if p < k0 { p } else { p + 2 };
                out.push(through(
                    p,
                    q,
                    vec![
                        Prim::Smooth {
                            y0: y,
                            y1: y + 0.5,
                            z0: strand_z(p),
                            z1: strand_z(q),
                        },
                        flat(y + 0.5, y + 1.0, strand_z(q)),
                    ],
                ));
            }
            let tip = [y + 0.5, strand_z(k0) - 0.5];
            out.push(Path {
                from: (Side::Right, k0),
                to: (Side::Right, k0 + 1),
                prims: vec![
                    Prim::Branch { tip, upper: true, opening: 1.0 },
                    Prim::Branch { tip, upper: false, opening: 1.0 },
                ],
                over: false,
            });
        }
        Event::RightCusp(k) => {
            let k0 = k - 1;
            for p in 0..n_in {
                if p == k0 || p == k0 + 1 {
                    continue;
                }
                let q = if p < k0 { p } else { p - 2 };
                out.push(through(
                    p,
                    q,
                    vec![
                        flat(y, y + 0.5, strand_z(p)),
                        Prim::Smooth {
                            y0: y + 0.5,
                            y1: y + 1.0,
                            z0: strand_z(p),
                            z1: strand_z(q),
                        },
                    ],
                ));
            }
            let tip = [y + 0.5, strand_z(k0) - 0.5];
            out.push(Path {
                from: (Side::Left, k0),
                to: (Side::Left, k0 + 1),
                prims: vec![
                    Prim::Branch { tip, upper: true, opening: -1.0 },
                    Prim::Branch { tip, upper: false, opening: -1.0 },
                ],
                over: false,
            });
        }
    }
    out
}

/// How to walk a primitive: `forward` runs `u` from 0 to 1.
#[derive(Clone, Copy, Debug)]
struct Walk {
    prim: Prim,
    forward: bool,
}

/// Rightward order of primitives along a path from `from` to `to`. Cusp
/// paths start on a branch heading into the tip.
fn walks(path: &Path, reverse: bool) -> Vec<Walk> {
    let cusp = matches!(path.prims[0], Prim::Branch { .. });
    let mut ws: Vec<Walk> = if cusp {
        vec![
            Walk { prim: path.prims[0], forward: false },
            Walk { prim: path.prims[1], forward: true },
        ]
    } else {
        path.prims.iter().map(|&prim| Walk { prim, forward: true }).collect()
    };
    if reverse {
        ws.reverse();
        for w in &mut ws {
            w.forward = !w.forward;
        }
    }
    ws
}

/// Sampled Legendrian curve with exact tangents.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceCurve {
    pub points: Vec<[f64; 3]>,
    pub tangents: Vec<[f64; 3]>,
}

impl Serialize for SpaceCurve {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.points.serialize(s)
    }
}

impl SpaceCurve {
    /// `max |alpha_1(gamma')|` over the samples, `alpha_1 = dz + x dy`.
    pub fn legendrian_residual(&self) -> f64 {
        self.points
            .iter()
            .zip(&self.tangents)
            .map(|(p, t)| (t[2] + p[0] * t[1]).abs())
            .fold(0.0, f64::max)
    }

    /// Smallest distance between samples more than `skip` apart along the
    /// closed curve.
    pub fn min_separation(&self, skip: usize) -> f64 {
        let n = self.points.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in i + 1..n {
                let gap = (j - i).min(n - (j - i));
                if gap <= skip {
                    continue;
                }
                let (a, b) = (self.points[i], self.points[j]);
                let d = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                best = best.min(d);
            }
        }
        best
    }
}

struct Cells {
    paths: Vec<Vec<Path>>,
    index: Vec<HashMap<(Side, usize), usize>>,
}

fn cells(word: &FrontWord) -> Cells {
    let profile = word.profile();
    let mut paths = Vec::with_capacity(word.len());
    let mut index = Vec::with_capacity(word.len());
    for (j, &e) in word.events().iter().enumerate() {
        let ps = cell_paths(e, j, profile[j]);
        let mut map = HashMap::new();
        for (i, p) in ps.iter().enumerate() {
            map.insert(p.from, i);
            map.insert(p.to, i);
        }
        paths.push(ps);
        index.push(map);
    }
    Cells { paths, index }
}

/// Walks the knot from the base point, returning the primitives in
/// traversal order.
fn traverse(word: &FrontWord) -> Vec<Walk> {
    let c = cells(word);
    let start = base_state(word);
    let mut s = start;
    let mut out = Vec::new();
    loop {
        let (j, side) = match s.dir {
            Direction::Right => (s.slot, Side::Left),
            Direction::Left => (s.slot - 1, Side::Right),
        };
        let path = &c.paths[j][c.index[j][&(side, s.pos)]];
        let reverse = path.from != (side, s.pos);
        out.extend(walks(path, reverse));
        let (exit_side, pos) = if reverse { path.from } else { path.to };
        s = match exit_side {
            Side::Right => State { slot: j + 1, pos, dir: Direction::Right },
            Side::Left => State { slot: j, pos, dir: Direction::Left },
        };
        if s == start {
            return out;
        }
    }
}

/// Legendrian realization of the front, sampled `samples_per_segment` times
/// on every primitive piece, in the default orientation.
pub fn to_space_curve(word: &FrontWord, samples_per_segment: usize) -> Result<SpaceCurve, FrontError> {
    if samples_per_segment == 0 {
        return Err(FrontError::new(Rule::Samples, None, "samples_per_segment must be positive"));
    }
    let mut points = Vec::new();
    let mut tangents = Vec::new();
    for w in traverse(word) {
        for i in 0..samples_per_segment {
            let u = i as f64 / samples_per_segment as f64;
            let (p, mut t) = w.prim.eval(if w.forward { u } else { 1.0 - u });
            if !w.forward {
                t = t.map(|v| -v);
            }
            points.push(p);
            tangents.push(t);
        }
    }
    Ok(SpaceCurve { points, tangents })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SvgPath {
    pub d: String,
    /// `strand`, `cusp` or `over` (the front strand at a crossing).
    pub role: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrontGeometry {
    pub width: f64,
    pub height: f64,
    pub paths: Vec<SvgPath>,
    pub svg: String,
    pub samples: SpaceCurve,
}

const SCALE: f64 = 40.0;
const PAD: f64 = 20.0;

fn screen(y: f64, z: f64) -> (f64, f64) {
    (PAD + y * SCALE, PAD + (-z - 0.5) * SCALE)
}

fn prim_svg(d: &mut String, prim: Prim, first: bool) {
    match prim {
        Prim::Smooth { y0, y1, z0, z1 } => {
            let (ax, ay) = screen(y0, z0);
            let (bx, by) = screen(y1, z1);
            let mid = (bx - ax) / 2.0;
            if first {
                let _ = write!(d, "M{ax:.2},{ay:.2} ");
            }
            let _ = write!(d, "C{:.2},{ay:.2} {:.2},{by:.2} {bx:.2},{by:.2} ", ax + mid, bx - mid);
        }
        Prim::Branch { tip, upper, opening } => {
            // semicubical arc from the tip, tangent to the axis at both ends
            let sigma = if upper { 1.0 } else { -1.0 };
            let end = [tip[0] + opening * CUSP_LENGTH, tip[1] + sigma * CUSP_HEIGHT];
            let (ax, ay) = screen(tip[0], tip[1]);
            let (bx, by) = screen(end[0], end[1]);
            let c1 = screen(tip[0] + opening * CUSP_LENGTH * 0.45, tip[1]);
            let c2 = screen(end[0] - opening * CUSP_LENGTH * 0.2, end[1]);
            if first {
                let _ = write!(d, "M{ax:.2},{ay:.2} ");
            }
            let _ = write!(d, "C{:.2},{:.2} {:.2},{:.2} {bx:.2},{by:.2} ", c1.0, c1.1, c2.0, c2.1);
        }
    }
}

/// SVG drawing and 3D samples of a front.
pub fn front_geometry(word: &FrontWord, samples_per_segment: usize) -> Result<FrontGeometry, FrontError> {
    let samples = to_space_curve(word, samples_per_segment)?;
    let c = cells(word);
    let mut paths = Vec::new();
    for cell in &c.paths {
        for path in cell {
            let cusp = matches!(path.prims[0], Prim::Branch { .. });
            let mut d = String::new();
            if cusp {
                prim_svg(&mut d, path.prims[0], true);
                let mut second = String::new();
                prim_svg(&mut second, path.prims[1], true);
                d.push_str(&second);
            } else {
                for (i, &p) in path.prims.iter().enumerate() {
                    prim_svg(&mut d, p, i == 0);
                }
            }
            let role = if cusp {
                "cusp"
            } else if path.over {
                "over"
            } else {
                "strand"
            };
            paths.push(SvgPath {
                d: d.trim_end().to_string(),
                role,
            });
        }
    }
    let width = 2.0 * PAD + word.len() as f64 * SCALE;
    let height = 2.0 * PAD + word.max_strands() as f64 * SCALE;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(svg, "<title>{word}</title>");
    for p in paths.iter().filter(|p| p.role != "over") {
        let _ = writeln!(svg, r##"<path d="{}" fill="none" stroke="#222" stroke-width="1.5"/>"##, p.d);
    }
    for p in paths.iter().filter(|p| p.role == "over") {
        let _ = writeln!(svg, r##"<path d="{}" fill="none" stroke="#fff" stroke-width="6"/>"##, p.d);
        let _ = writeln!(svg, r##"<path d="{}" fill="none" stroke="#222" stroke-width="1.5"/>"##, p.d);
    }
    svg.push_str("</svg>\n");
    Ok(FrontGeometry {
        width,
        height,
        paths,
        svg,
        samples,
    })
}
