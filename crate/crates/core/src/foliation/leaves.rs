use rayon::prelude::*;
use serde::Serialize;

use super::pullback::PulledBackForm;
use super::surface::Surface;
use super::{FoliationError, FoliationOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LeafEnd {
    Boundary,
    Singularity,
    MaxLength,
    NonFinite,
}

/// A traced leaf in unwrapped chart coordinates (periodic axes are not
/// reduced, so the polyline is continuous).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Leaf {
    pub points: Vec<[f64; 2]>,
    pub length: f64,
    pub end: LeafEnd,
    /// `+1` along the leaf orientation, `-1` against it.
    pub direction: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosedLeaf {
    pub seed: [f64; 2],
    /// Chart arc length of one circuit.
    pub period: f64,
    pub points: Vec<[f64; 2]>,
    /// Lattice displacement after one circuit; zero for a contractible loop.
    pub displacement: [i64; 2],
    pub direction: i8,
    /// Reached by iterating the return map from a seed off the cycle.
    pub limit_cycle: bool,
    pub returns: usize,
    /// Distance between the last two returns.
    pub recurrence: f64,
}

fn unit_field(pb: &PulledBackForm, q: [f64; 2], dir: f64, tol: f64) -> Option<[f64; 2]> {
    let w = pb.w_at(q);
    let m = w[0].hypot(w[1]);
    if !(m.is_finite() && m >= tol) {
        return None;
    }
    Some([dir * w[0] / m, dir * w[1] / m])
}

fn rk4(pb: &PulledBackForm, q: [f64; 2], h: f64, dir: f64, tol: f64) -> Option<[f64; 2]> {
    let k1 = unit_field(pb, q, dir, tol)?;
    let k2 = unit_field(pb, [q[0] + 0.5 * h * k1[0], q[1] + 0.5 * h * k1[1]], dir, tol)?;
    let k3 = unit_field(pb, [q[0] + 0.5 * h * k2[0], q[1] + 0.5 * h * k2[1]], dir, tol)?;
    let k4 = unit_field(pb, [q[0] + h * k3[0], q[1] + h * k3[1]], dir, tol)?;
    // the field turned around within one step: a zero was stepped over
    if k1[0] * k4[0] + k1[1] * k4[1] < 0.0 {
        return None;
    }
    Some([
        q[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        q[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

/// Boundary slack: leaves lying on a boundary edge may drift by rounding.
const EDGE_SLACK: f64 = 1e-9;

/// Traces the leaf through `seed` with fixed-step RK4 on `W / |W|`.
pub fn integrate_leaf(
    pb: &PulledBackForm,
    surface: &Surface,
    seed: [f64; 2],
    direction: i8,
    opts: &FoliationOptions,
) -> Result<Leaf, FoliationError> {
    if !(opts.step > 1e-9 && opts.step.is_finite()) {
        return Err(FoliationError::StepUnderflow(opts.step));
    }
    let dir = if direction < 0 { -1.0 } else { 1.0 };
    if unit_field(pb, seed, dir, opts.singular_tol).is_none() {
        return Err(FoliationError::ImmediateSingularity(seed));
    }
    let h = opts.step;
    let mut points = vec![seed];
    let mut q = seed;
    let mut length = 0.0;
    let end = loop {
        if length >= opts.max_length {
            break LeafEnd::MaxLength;
        }
        let Some(next) = rk4(pb, q, h, dir, opts.singular_tol) else {
            let w = pb.w_at(q);
            break if w[0].is_finite() && w[1].is_finite() {
                LeafEnd::Singularity
            } else {
                LeafEnd::NonFinite
            };
        };
        if !surface.in_chart(next, EDGE_SLACK) {
            points.push(clip_to_chart(surface, q, next));
            length += h;
            break LeafEnd::Boundary;
        }
        length += h;
        q = next;
        points.push(q);
    };
    Ok(Leaf {
        points,
        length,
        end,
        direction: dir as i8,
    })
}

fn clip_to_chart(surface: &Surface, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    let mut t: f64 = 1.0;
    for i in 0..2 {
        if surface.periodic()[i] || (0.0..=1.0).contains(&b[i]) {
            continue;
        }
        let edge = if b[i] > 1.0 { 1.0 } else { 0.0 };
        t = t.min(((edge - a[i]) / (b[i] - a[i])).clamp(0.0, 1.0));
    }
    let mut p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    for i in 0..2 {
        if !surface.periodic()[i] {
            p[i] = p[i].clamp(0.0, 1.0);
        }
    }
    p
}

/// Seed lattice: cell centers on bounded axes, `k / n` on periodic axes.
pub fn default_seeds(surface: &Surface, opts: &FoliationOptions) -> Vec<[f64; 2]> {
    let n = opts.seeds;
    let coord = |axis: usize, k: usize| {
        if surface.periodic()[axis] {
            k as f64 / n as f64
        } else {
            (k as f64 + 0.5) / n as f64
        }
    };
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| [coord(0, i), coord(1, j)])
        .collect()
}

struct Return {
    point: [f64; 2],
    path: Vec<[f64; 2]>,
    length: f64,
}

/// Follows the leaf from `p` to its first return to the line through `p`
/// orthogonal to the leaf.
fn first_return(pb: &PulledBackForm, surface: &Surface, p: [f64; 2], dir: f64, opts: &FoliationOptions) -> Option<Return> {
    let d0 = unit_field(pb, p, dir, opts.singular_tol)?;
    let h = opts.step;
    let section = |q: [f64; 2]| {
        let d = surface.chart_delta(p, q);
        (d[0] * d0[0] + d[1] * d0[1], (d[0] * d0[1] - d[1] * d0[0]).abs())
    };
    let mut path = vec![p];
    let mut q = p;
    let mut length = 0.0;
    let mut s_prev = 0.0;
    let mut steps = 0usize;
    while length < opts.max_length {
        let next = rk4(pb, q, h, dir, opts.singular_tol)?;
        if !surface.in_chart(next, EDGE_SLACK) {
            return None;
        }
        let (s_next, perp) = section(next);
        steps += 1;
        if steps > 4 && s_prev < 0.0 && s_next >= 0.0 && s_next - s_prev < 2.5 * h && perp < 0.45 {
            // secant refinement of the partial step hitting the section
            let (mut t0, mut f0) = (0.0, s_prev);
            let (mut t1, mut f1) = (h, s_next);
            let mut hit = next;
            for _ in 0..30 {
                if f1 == f0 {
                    break;
                }
                let t = (t1 - (f1 * (t1 - t0) / (f1 - f0))).clamp(0.0, h);
                hit = rk4(pb, q, t, dir, opts.singular_tol)?;
                let (f, _) = section(hit);
                t0 = t1;
                f0 = f1;
                t1 = t;
                f1 = f;
                if f.abs() < 1e-15 {
                    break;
                }
            }
            length += t1;
            let unwrapped = {
                let last = path.last().copied().unwrap_or(p);
                let d = surface.chart_delta(last, hit);
                [last[0] + d[0], last[1] + d[1]]
            };
            path.push(unwrapped);
            return Some(Return {
                point: unwrapped,
                path,
                length,
            });
        }
        s_prev = s_next;
        length += h;
        let last = *path.last().unwrap_or(&p);
        path.push([last[0] + (next[0] - q[0]), last[1] + (next[1] - q[1])]);
        q = next;
    }
    None
}

fn trace_closed(
    pb: &PulledBackForm,
    surface: &Surface,
    seed: [f64; 2],
    dir: f64,
    opts: &FoliationOptions,
) -> Option<ClosedLeaf> {
    let mut p = seed;
    let mut previous = f64::INFINITY;
    for k in 0..opts.max_returns {
        let r = first_return(pb, surface, p, dir, opts)?;
        let gap = surface.chart_distance(p, r.point);
        if gap < opts.recurrence_tol {
            let start = r.path[0];
            let displacement = [0, 1].map(|i| {
                if surface.periodic()[i] {
                    (r.point[i] - start[i]).round() as i64
                } else {
                    0
                }
            });
            return Some(ClosedLeaf {
                seed: p,
                period: r.length,
                points: r.path,
                displacement,
                direction: dir as i8,
                limit_cycle: k > 0,
                returns: k + 1,
                recurrence: gap,
            });
        }
        if gap >= previous {
            return None;
        }
        previous = gap;
        p = surface.wrap(r.point);
    }
    None
}

/// Seeds leaves in both directions and keeps those whose return map
/// closes up within `recurrence_tol`, following converging returns to a
/// limit cycle. Not finding a closed leaf does not prove there is none.
pub fn detect_closed_leaves(
    pb: &PulledBackForm,
    surface: &Surface,
    seeds: &[[f64; 2]],
    opts: &FoliationOptions,
) -> Vec<ClosedLeaf> {
    let jobs: Vec<([f64; 2], f64)> = seeds.iter().flat_map(|s| [(*s, 1.0), (*s, -1.0)]).collect();
    let found: Vec<Option<ClosedLeaf>> = jobs
        .par_iter()
        .map(|(s, d)| trace_closed(pb, surface, *s, *d, opts))
        .collect();
    let mut out: Vec<ClosedLeaf> = Vec::new();
    for leaf in found.into_iter().flatten() {
        if !out.iter().any(|known| same_cycle(surface, known, &leaf, opts.step)) {
            out.push(leaf);
        }
    }
    out
}

fn same_cycle(surface: &Surface, a: &ClosedLeaf, b: &ClosedLeaf, step: f64) -> bool {
    if (a.period - b.period).abs() > 0.01 * a.period.max(b.period) + 4.0 * step {
        return false;
    }
    let probe = |p: [f64; 2]| {
        a.points
            .iter()
            .map(|q| surface.chart_distance(*q, p))
            .fold(f64::INFINITY, f64::min)
    };
    [0, b.points.len() / 3, 2 * b.points.len() / 3]
        .iter()
        .all(|&i| probe(b.points[i]) < 2.0 * step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{rotational_alpha, standard_alpha, ContactForm, Domain};
    use crate::foliation::pullback::pullback;
    use crate::foliation::surface::{examples::*, Topology};

    fn opts() -> FoliationOptions {
        FoliationOptions::default()
    }

    #[test]
    fn yz_plane_leaves_are_horizontal() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = Surface::new(["0", "u", "v"].map(|t| t.parse().unwrap()), [false, false], Topology::Disk, vec![])
            .unwrap();
        let pb = pullback(&c, &s).unwrap();
        let leaf = integrate_leaf(&pb, &s, [0.1, 0.3], 1, &opts()).unwrap();
        assert_eq!(leaf.end, LeafEnd::Boundary);
        assert!(leaf.points.iter().all(|q| (q[1] - 0.3).abs() < 1e-15));
        assert!((leaf.points.last().unwrap()[0] - 1.0).abs() < 1e-12);
        assert!(detect_closed_leaves(&pb, &s, &default_seeds(&s, &opts()), &opts()).is_empty());
    }

    #[test]
    fn seed_at_singularity_is_an_error() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = Surface::new(["u", "v", "0"].map(|t| t.parse().unwrap()), [false, false], Topology::Disk, vec![])
            .unwrap();
        let pb = pullback(&c, &s).unwrap();
        assert_eq!(
            integrate_leaf(&pb, &s, [0.0, 0.5], 1, &opts()).unwrap_err(),
            FoliationError::ImmediateSingularity([0.0, 0.5])
        );
    }

    #[test]
    fn sphere_leaves_run_from_north_to_south() {
        let c = ContactForm::assume(rotational_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = sphere();
        let pb = pullback(&c, &s).unwrap();
        for seed in [[0.3, 0.1], [0.5, 0.5], [0.8, 0.9]] {
            let fwd = integrate_leaf(&pb, &s, seed, 1, &opts()).unwrap();
            let back = integrate_leaf(&pb, &s, seed, -1, &opts()).unwrap();
            let end = *fwd.points.last().unwrap();
            let start = *back.points.last().unwrap();
            assert!(s.point(end[0], end[1])[2] < -0.999, "{end:?}");
            assert!(s.point(start[0], start[1])[2] > 0.999, "{start:?}");
        }
    }

    #[test]
    fn torus_closed_leaves() {
        let c = ContactForm::assume(standard_alpha(), Domain::quotient(-2.0, 2.0, 1.0, 1.0)).unwrap();
        let s = torus_sine();
        let pb = pullback(&c, &s).unwrap();
        let leaves = detect_closed_leaves(&pb, &s, &default_seeds(&s, &opts()), &opts());
        let mut heights: Vec<f64> = leaves.iter().map(|l| s.wrap(l.seed)[1]).collect();
        heights.sort_by(f64::total_cmp);
        assert_eq!(heights.len(), 2, "{heights:?}");
        assert!(heights[0].min(1.0 - heights[0]) < 1e-6 || heights[1].min(1.0 - heights[1]) < 1e-6);
        assert!(heights.iter().any(|h| (h - 0.5).abs() < 1e-6));
        for l in &leaves {
            assert!((l.period - 1.0).abs() < 1e-6);
            assert_eq!(l.displacement[0].abs(), 1);
        }
    }
}
