use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::pullback::PulledBackForm;
use super::surface::{Surface, Topology};
use super::{FoliationError, FoliationOptions};

/// One component of the dividing set, in unwrapped chart coordinates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaCurve {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
    /// Lattice displacement around a closed component.
    pub displacement: [i64; 2],
    pub contractible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Region {
    /// `+1` for a component of the positive region, `-1` otherwise.
    pub sign: i8,
    pub nodes: usize,
    /// Nodes at least two cells away from the dividing set.
    pub interior_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    /// Smallest angle between `W` and the dividing set, in radians.
    pub transversality_margin: Option<f64>,
    /// Smallest `div W` on interior samples of the positive region.
    pub expansion_margin: Option<f64>,
    /// Smallest `-div W` on interior samples of the negative region.
    pub contraction_margin: Option<f64>,
    /// Largest normalized `W . grad(div W)` along the dividing set; negative
    /// when `W` leaves the positive region everywhere.
    pub outward_margin: Option<f64>,
    pub splits: bool,
    pub transverse: bool,
    pub divides: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DividingStatus {
    Certified,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DividingSetReport {
    pub gamma: Vec<GammaCurve>,
    pub regions: Vec<Region>,
    pub certificate: Certificate,
    pub status: DividingStatus,
    pub reason: Option<String>,
    /// A contractible closed component on a closed surface other than the
    /// sphere.
    pub overtwisted_witness: bool,
    pub options: FoliationOptions,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum EdgeKey {
    /// Edge from node `(i, j)` to `(i + 1, j)`.
    H(usize, usize),
    /// Edge from node `(i, j)` to `(i, j + 1)`.
    V(usize, usize),
}

struct Grid<'a> {
    n: usize,
    values: Vec<f64>,
    surface: &'a Surface,
}

impl Grid<'_> {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * (self.n + 1) + j]
    }

    fn positive(&self, i: usize, j: usize) -> bool {
        self.at(i, j) >= 0.0
    }

    fn canonical(&self, key: EdgeKey) -> EdgeKey {
        let [pu, pv] = self.surface.periodic();
        let n = self.n;
        match key {
            EdgeKey::H(i, j) => EdgeKey::H(i, if pv && j == n { 0 } else { j }),
            EdgeKey::V(i, j) => EdgeKey::V(if pu && i == n { 0 } else { i }, j),
        }
    }

    fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [i as f64 / self.n as f64, j as f64 / self.n as f64]
    }
}

/// Zero contour of `div W`, checked against the three defining conditions
/// of a dividing set with `w = W` and `omega = du ^ dv`.
pub fn dividing_set(
    pb: &PulledBackForm,
    surface: &Surface,
    opts: &FoliationOptions,
) -> Result<DividingSetReport, FoliationError> {
    opts.validate()?;
    let n = opts.grid;
    let nodes: Vec<[f64; 2]> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| [i as f64 / n as f64, j as f64 / n as f64]))
        .collect();
    let values: Vec<f64> = nodes.par_iter().map(|q| pb.div_at(*q)).collect();
    if let Some(k) = values.iter().position(|v| !v.is_finite()) {
        return Err(FoliationError::Surface(format!("div W is not finite at {:?}", nodes[k])));
    }
    let grid = Grid {
        n,
        values,
        surface,
    };

    // marching squares
    let mut crossings: HashMap<EdgeKey, [f64; 2]> = HashMap::new();
    let mut segments: Vec<(EdgeKey, EdgeKey, [usize; 2])> = Vec::new();
    let mut cell_marked = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let bits: u8 = corners
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| (grid.positive(a, b) as u8) << k)
                .sum();
            let edges = [
                EdgeKey::H(i, j),
                EdgeKey::V(i + 1, j),
                EdgeKey::H(i, j + 1),
                EdgeKey::V(i, j),
            ];
            let pairs: &[(usize, usize)] = match bits {
                0 | 15 => &[],
                1 | 14 => &[(3, 0)],
                2 | 13 => &[(0, 1)],
                3 | 12 => &[(3, 1)],
                4 | 11 => &[(1, 2)],
                6 | 9 => &[(0, 2)],
                7 | 8 => &[(3, 2)],
                5 | 10 => {
                    let c = pb.div_at([(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
                    let center_positive = c >= 0.0;
                    let corner0_positive = bits & 1 != 0;
                    if center_positive == corner0_positive {
                        &[(0, 1), (2, 3)]
                    } else {
                        &[(3, 0), (1, 2)]
                    }
                }
                _ => unreachable!(),
            };
            for &(a, b) in pairs {
                let ka = grid.canonical(edges[a]);
                let kb = grid.canonical(edges[b]);
                for k in [ka, kb] {
                    crossings.entry(k).or_insert_with(|| refine(pb, &grid, k, opts.contour_tol));
                }
                segments.push((ka, kb, [i, j]));
                cell_marked[i * n + j] = true;
            }
        }
    }

    let gamma = join_segments(&grid, &crossings, &segments);
    let (regions, node_region) = flood_regions(&grid);

    // interior samples: nodes with no marked cell within two cells
    let [pu, pv] = surface.periodic();
    let far = |i: usize, j: usize| {
        for di in -2i64..=1 {
            for dj in -2i64..=1 {
                let a = i as i64 + di;
                let b = j as i64 + dj;
                let a = if pu { a.rem_euclid(n as i64) } else { a };
                let b = if pv { b.rem_euclid(n as i64) } else { b };
                if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                    continue;
                }
                if cell_marked[a as usize * n + b as usize] {
                    return false;
                }
            }
        }
        true
    };
    let mut expansion: Option<f64> = None;
    let mut contraction: Option<f64> = None;
    let mut interior = vec![0usize; regions.len()];
    for i in 0..=n {
        for j in 0..=n {
            if !far(i, j) {
                continue;
            }
            let h = grid.at(i, j);
            interior[node_region[i * (n + 1) + j]] += 1;
            if h >= 0.0 {
                expansion = Some(expansion.map_or(h, |m| m.min(h)));
            } else {
                contraction = Some(contraction.map_or(-h, |m| m.min(-h)));
            }
        }
    }
    let regions: Vec<Region> = regions
        .into_iter()
        .zip(interior)
        .map(|((sign, nodes), interior_samples)| Region {
            sign,
            nodes,
            interior_samples,
        })
        .collect();

    // transversality and outward direction along the dividing set
    let mut transversality: Option<f64> = None;
    let mut outward: Option<f64> = None;
    let mut singular_on_gamma = false;
    for c in &gamma {
        let m = c.points.len();
        for k in 0..m {
            let (prev, next) = if c.closed {
                (c.points[(k + m - 2) % (m - 1)], c.points[(k + 1) % (m - 1)])
            } else {
                (c.points[k.saturating_sub(1)], c.points[(k + 1).min(m - 1)])
            };
            if c.closed && k == m - 1 {
                continue;
            }
            let t = [next[0] - prev[0], next[1] - prev[1]];
            let q = surface.wrap(c.points[k]);
            let w = pb.w_at(q);
            let wl = w[0].hypot(w[1]);
            let tl = t[0].hypot(t[1]);
            if !(wl > opts.singular_tol) {
                singular_on_gamma = true;
                continue;
            }
            if tl > 0.0 {
                let s = ((t[0] * w[1] - t[1] * w[0]).abs() / (tl * wl)).min(1.0);
                let angle = s.asin();
                transversality = Some(transversality.map_or(angle, |a| a.min(angle)));
            }
            let g = pb.div_grad_at(q);
            let gl = g[0].hypot(g[1]);
            if gl > 0.0 {
                let o = (w[0] * g[0] + w[1] * g[1]) / (wl * gl);
                outward = Some(outward.map_or(o, |a| a.max(o)));
            }
        }
    }

    let splits = regions.iter().all(|r| r.nodes > 0);
    let transverse = !singular_on_gamma && transversality.map_or(true, |a| a > opts.transversality_tol);
    let has_pos = regions.iter().any(|r| r.sign > 0);
    let has_neg = regions.iter().any(|r| r.sign < 0);
    let divides = (!has_pos || expansion.is_some_and(|m| m > opts.divergence_tol))
        && (!has_neg || contraction.is_some_and(|m| m > opts.divergence_tol))
        && outward.map_or(true, |o| o < 0.0);

    let reason = if singular_on_gamma {
        Some("singularity on the dividing set".to_string())
    } else if !splits {
        Some("complement does not split into signed regions".to_string())
    } else if !transverse {
        Some(format!(
            "foliation is not transverse to the dividing set (margin {:?})",
            transversality
        ))
    } else if !divides {
        Some(format!(
            "div W does not separate the regions (expansion {:?}, contraction {:?}, outward {:?})",
            expansion, contraction, outward
        ))
    } else {
        None
    };

    let overtwisted_witness = surface.topology() == Topology::Torus && gamma.iter().any(|c| c.closed && c.contractible);

    Ok(DividingSetReport {
        certificate: Certificate {
            transversality_margin: transversality,
            expansion_margin: expansion,
            contraction_margin: contraction,
            outward_margin: outward,
            splits,
            transverse,
            divides,
        },
        status: if reason.is_none() {
            DividingStatus::Certified
        } else {
            DividingStatus::Failed
        },
        reason,
        gamma,
        regions,
        overtwisted_witness,
        options: *opts,
    })
}

/// Bisection on the grid edge for the zero of `div W`.
fn refine(pb: &PulledBackForm, grid: &Grid, key: EdgeKey, tol: f64) -> [f64; 2] {
    let (a, b) = match key {
        EdgeKey::H(i, j) => (grid.node(i, j), grid.node(i + 1, j)),
        EdgeKey::V(i, j) => (grid.node(i, j), grid.node(i, j + 1)),
    };
    let point = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut lo, mut hi) = (0.0, 1.0);
    let lo_positive = pb.div_at(a) >= 0.0;
    let len = 1.0 / grid.n as f64;
    while (hi - lo) * len > tol {
        let mid = 0.5 * (lo + hi);
        if (pb.div_at(point(mid)) >= 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    point(0.5 * (lo + hi))
}

fn join_segments(
    grid: &Grid,
    crossings: &HashMap<EdgeKey, [f64; 2]>,
    segments: &[(EdgeKey, EdgeKey, [usize; 2])],
) -> Vec<GammaCurve> {
    let mut incident: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, (a, b, _)) in segments.iter().enumerate() {
        incident.entry(*a).or_default().push(s);
        incident.entry(*b).or_default().push(s);
    }
    // position of a crossing as seen from inside a given cell
    let local = |key: EdgeKey, cell: [usize; 2]| {
        let p = crossings[&key];
        let center = [
            (cell[0] as f64 + 0.5) / grid.n as f64,
            (cell[1] as f64 + 0.5) / grid.n as f64,
        ];
        let d = grid.surface.chart_delta(center, p);
        [center[0] + d[0], center[1] + d[1]]
    };
    let mut used = vec![false; segments.len()];
    let mut starts: Vec<EdgeKey> = incident
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    starts.sort();
    let mut rest: Vec<EdgeKey> = incident.keys().copied().collect();
    rest.sort();
    starts.extend(rest);

    let mut curves = Vec::new();
    for start in starts {
        let Some(&first) = incident[&start].iter().find(|&&s| !used[s]) else { continue };
        let open = incident[&start].len() == 1;
        let mut key = start;
        let mut seg = first;
        let mut pos = crossings[&start];
        let mut points = vec![pos];
        loop {
            used[seg] = true;
            let (a, b, cell) = segments[seg];
            let other = if a == key { b } else { a };
            let from = local(key, cell);
            let to = local(other, cell);
            pos = [pos[0] + to[0] - from[0], pos[1] + to[1] - from[1]];
            points.push(pos);
            key = other;
            match incident[&key].iter().find(|&&s| !used[s]) {
                Some(&s) => seg = s,
                None => break,
            }
        }
        let closed = !open && key == start;
        let first_pt = points[0];
        let last_pt = *points.last().unwrap_or(&first_pt);
        let displacement = if closed {
            [0, 1].map(|i| (last_pt[i] - first_pt[i]).round() as i64)
        } else {
            [0, 0]
        };
        curves.push(GammaCurve {
            points,
            closed,
            displacement,
            contractible: closed && displacement == [0, 0],
        });
    }
    curves
}

/// Connected components of equal-sign grid nodes.
fn flood_regions(grid: &Grid) -> (Vec<(i8, usize)>, Vec<usize>) {
    let n = grid.n;
    let [pu, pv] = grid.surface.periodic();
    let idx = |i: usize, j: usize| i * (n + 1) + j;
    // identify duplicated periodic nodes with their representative
    let rep = |i: usize, j: usize| (if pu && i == n { 0 } else { i }, if pv && j == n { 0 } else { j });
    let mut label = vec![usize::MAX; (n + 1) * (n + 1)];
    let mut regions = Vec::new();
    for i0 in 0..=n {
        for j0 in 0..=n {
            let (i0, j0) = rep(i0, j0);
            if label[idx(i0, j0)] != usize::MAX {
                continue;
            }
            let id = regions.len();
            let sign = grid.positive(i0, j0);
            let mut count = 0;
            let mut stack = vec![(i0, j0)];
            label[idx(i0, j0)] = id;
            while let Some((i, j)) = stack.pop() {
                count += 1;
                let mut nbrs = Vec::with_capacity(4);
                for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                    let mut a = i as i64 + di;
                    let mut b = j as i64 + dj;
                    if pu {
                        a = a.rem_euclid(n as i64);
                    }
                    if pv {
                        b = b.rem_euclid(n as i64);
                    }
                    if a < 0 || b < 0 || a > n as i64 || b > n as i64 {
                        continue;
                    }
                    nbrs.push(rep(a as usize, b as usize));
                }
                for (a, b) in nbrs {
                    if label[idx(a, b)] == usize::MAX && grid.positive(a, b) == sign {
                        label[idx(a, b)] = id;
                        stack.push((a, b));
                    }
                }
            }
            regions.push((if sign { 1 } else { -1 }, count));
        }
    }
    // duplicated periodic nodes share their representative's label
    for i in 0..=n {
        for j in 0..=n {
            let (a, b) = rep(i, j);
            label[idx(i, j)] = label[idx(a, b)];
        }
    }
    (regions, label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{standard_alpha, ContactForm, Domain};
    use crate::expr::Expr;
    use crate::foliation::pullback::pullback;
    use crate::foliation::surface::examples::*;

    fn opts() -> FoliationOptions {
        FoliationOptions::default()
    }

    #[test]
    fn torus_dividing_circles() {
        let c = ContactForm::assume(standard_alpha(), Domain::quotient(-2.0, 2.0, 1.0, 1.0)).unwrap();
        let s = torus_sine();
        let r = dividing_set(&pullback(&c, &s).unwrap(), &s, &opts()).unwrap();
        assert_eq!(r.status, DividingStatus::Certified, "{:?}", r.reason);
        assert_eq!(r.gamma.len(), 2);
        let mut heights: Vec<f64> = r
            .gamma
            .iter()
            .map(|g| {
                assert!(g.closed && !g.contractible);
                let v0 = s.wrap(g.points[0])[1];
                for p in &g.points {
                    assert!((s.wrap(*p)[1] - v0).abs() < 1e-8);
                }
                v0
            })
            .collect();
        heights.sort_by(f64::total_cmp);
        assert!((heights[0] - 0.25).abs() < 1e-8 && (heights[1] - 0.75).abs() < 1e-8);
        assert!(!r.overtwisted_witness);
        assert_eq!(r.regions.len(), 2);
    }

    #[test]
    fn flat_plane_is_not_certified() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = Surface::new(["0", "u", "v"].map(|t| t.parse().unwrap()), [false, false], Topology::Disk, vec![])
            .unwrap();
        let r = dividing_set(&pullback(&c, &s).unwrap(), &s, &opts()).unwrap();
        assert!(r.gamma.is_empty());
        assert_eq!(r.regions.len(), 1);
        assert_eq!(r.regions[0].sign, 1);
        assert_eq!(r.status, DividingStatus::Failed);
        assert_eq!(r.certificate.expansion_margin, Some(0.0));
    }

    #[test]
    fn contractible_component_on_a_torus_is_flagged() {
        // W = (f, 0) with f_u = cos 2 pi u + cos 2 pi v + 1.5, which vanishes
        // on a small loop around u = v = 1/2
        let s = torus_sine();
        let w1: Expr = "sin(2*pi*u)/(2*pi) + u*(cos(2*pi*v) + 1.5)".parse().unwrap();
        let pb = PulledBackForm::from_beta(Expr::zero(), w1);
        let r = dividing_set(&pb, &s, &opts()).unwrap();
        assert!(r.overtwisted_witness, "{:?}", r.gamma);
    }
}
