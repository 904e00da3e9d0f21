//! C^0 approximation of closed space curves by Legendrian knots.
//!
//! The input is smoothed by a truncated Fourier series `(xb, yb, zb)`. The
//! Legendrian curve is then
//!
//! ```text
//! X = xb + q cos(w t),  Y = yb + p(t) sin(w t) / w,  Z' = -X Y'
//! ```
//!
//! with `p q = -2 (zb' + xb yb')`, so that `Z` follows `zb` on average while
//! the front zig-zags wherever the slope of the input disagrees with `-x`.
//! A constant shift of `p` closes `Z` up exactly. The front word is read
//! off the sampled `(Y, Z)` curve by a plane sweep.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::geometry::{to_space_curve, SpaceCurve};
use super::{Event, FrontError, FrontWord, Rule};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApproxOptions {
    /// Upper bound on the length of the output word.
    pub max_events: usize,
    /// Largest Fourier mode used to smooth the input.
    pub max_modes: usize,
    pub samples_per_oscillation: usize,
    /// Relative slope mismatch below which the input counts as Legendrian.
    pub legendrian_tol: f64,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            max_events: 50_000,
            max_modes: 64,
            samples_per_oscillation: 24,
            legendrian_tol: 0.1,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApproxError {
    #[error("epsilon must be positive and finite, got {0}")]
    Epsilon(f64),
    #[error("polyline needs at least 3 distinct finite vertices")]
    Polyline,
    #[error("epsilon {epsilon} is not reachable within {max_events} events; best Hausdorff distance {achieved}")]
    Unreachable {
        epsilon: f64,
        achieved: f64,
        max_events: usize,
    },
    #[error(transparent)]
    Front(#[from] FrontError),
}

#[derive(Clone, Debug, Serialize)]
pub struct Approximation {
    pub word: FrontWord,
    pub curve: SpaceCurve,
    pub hausdorff: f64,
    pub legendrian_residual: f64,
    pub modes: usize,
    pub oscillations: usize,
    /// The input already satisfied the Legendrian condition and its own
    /// front was used.
    pub legendrian_input: bool,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn len(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn point_segment(p: [f64; 3], a: [f64; 3], b: [f64; 3]) -> f64 {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    let t = if l2 > 0.0 { (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
    len(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1], a[2] + t * ab[2]]))
}

/// Points along a closed polyline with spacing at most `h`.
fn densify(poly: &[[f64; 3]], h: f64) -> Vec<[f64; 3]> {
    let n = poly.len();
    let mut out = Vec::new();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let pieces = ((len(sub(b, a)) / h).ceil() as usize).max(1);
        for k in 0..pieces {
            let t = k as f64 / pieces as f64;
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]);
        }
    }
    out
}

fn directed(from: &[[f64; 3]], to: &[[f64; 3]]) -> f64 {
    let n = to.len();
    from.par_iter()
        .map(|&p| {
            (0..n)
                .map(|i| point_segment(p, to[i], to[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Hausdorff distance between two closed polylines, with each side
/// sampled at 1/2000 of the common bounding-box diagonal.
pub fn hausdorff(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in a.iter().chain(b) {
        for k in 0..3 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let h = (len(sub(hi, lo)) / 2000.0).max(1e-12);
    directed(&densify(a, h), b).max(directed(&densify(b, h), a))
}

fn clean(poly: &[[f64; 3]]) -> Result<Vec<[f64; 3]>, ApproxError> {
    let mut out: Vec<[f64; 3]> = Vec::with_capacity(poly.len());
    for &p in poly {
        if !p.iter().all(|v| v.is_finite()) {
            return Err(ApproxError::Polyline);
        }
        if out.last().is_none_or(|&q| q != p) {
            out.push(p);
        }
    }
    while out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    if out.len() < 3 {
        return Err(ApproxError::Polyline);
    }
    Ok(out)
}

/// Largest relative defect `|dz + x dy| / |(dy, dz)|` over the edges.
fn slope_mismatch(poly: &[[f64; 3]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let (dy, dz) = (b[1] - a[1], b[2] - a[2]);
            let x = 0.5 * (a[0] + b[0]);
            (dz + x * dy).abs() / dy.hypot(dz).max(1e-300)
        })
        .fold(0.0, f64::max)
}

/// Truncated Fourier series of a closed curve in arc-length parameter.
struct Fourier {
    a: Vec<[f64; 3]>,
    b: Vec<[f64; 3]>,
}

impl Fourier {
    fn fit(poly: &[[f64; 3]], modes: usize) -> Fourier {
        let n = poly.len();
        let mut cum = vec![0.0; n + 1];
        for i in 0..n {
            cum[i + 1] = cum[i] + len(sub(poly[(i + 1) % n], poly[i]));
        }
        let total = cum[n];
        let m = (8 * n).clamp(2048, 16384);
        let mut samples = Vec::with_capacity(m);
        let mut seg = 0;
        for k in 0..m {
            let s = total * k as f64 / m as f64;
            while seg + 1 < n && cum[seg + 1] <= s {
                seg += 1;
            }
            let l = cum[seg + 1] - cum[seg];
            let t = if l > 0.0 { (s - cum[seg]) / l } else { 0.0 };
            let (p, q) = (poly[seg], poly[(seg + 1) % n]);
            samples.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1]), p[2] + t * (q[2] - p[2])]);
        }
        let mut a = vec![[0.0; 3]; modes + 1];
        let mut b = vec![[0.0; 3]; modes + 1];
        for (k, (ak, bk)) in a.iter_mut().zip(b.iter_mut()).enumerate() {
            let scale = if k == 0 { 1.0 } else { 2.0 } / m as f64;
            for (j, s) in samples.iter().enumerate() {
                let th = 2.0 * PI * (k * j % m) as f64 / m as f64;
                let (sn, cs) = th.sin_cos();
                for c in 0..3 {
                    ak[c] += scale * s[c] * cs;
                    bk[c] += scale * s[c] * sn;
                }
            }
        }
        Fourier { a, b }
    }

    /// Value, first and second derivative at `t` using modes `0..=k`.
    fn eval(&self, t: f64, k: usize) -> [[f64; 3]; 3] {
        let mut out = [self.a[0], [0.0; 3], [0.0; 3]];
        for j in 1..=k {
            let w = 2.0 * PI * j as f64;
            let (sn, cs) = (w * t).sin_cos();
            for c in 0..3 {
                let (a, b) = (self.a[j][c], self.b[j][c]);
                out[0][c] += a * cs + b * sn;
                out[1][c] += w * (-a * sn + b * cs);
                out[2][c] += -w * w * (a * cs + b * sn);
            }
        }
        out
    }
}

struct Smooth<'a> {
    f: &'a Fourier,
    modes: usize,
    q: f64,
}

/// Smoothed curve, mismatch-driven amplitude `p0` and its derivative.
struct Base {
    x: [f64; 3],
    dx: [f64; 3],
    p0: f64,
    dp0: f64,
}

impl Smooth<'_> {
    fn base(&self, t: f64) -> Base {
        let [c, d, dd] = self.f.eval(t, self.modes);
        // c = (x, y, z); mismatch m = z' + x y'
        let m = d[2] + c[0] * d[1];
        let dm = dd[2] + d[0] * d[1] + c[0] * dd[1];
        Base {
            x: c,
            dx: d,
            p0: -2.0 * m / self.q,
            dp0: -2.0 * dm / self.q,
        }
    }

    /// `Z'` split as `A + delta B`.
    fn dz_parts(&self, t: f64, w: f64) -> (f64, f64) {
        let b = self.base(t);
        let (sn, cs) = (w * t).sin_cos();
        let x = b.x[0] + self.q * cs;
        let dy = b.dx[1] + b.p0 * cs + b.dp0 * sn / w;
        (-x * dy, -x * cs)
    }
}

const GAUSS: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

fn build_curve(s: &Smooth, oscillations: usize, spo: usize) -> SpaceCurve {
    let w = 2.0 * PI * oscillations as f64;
    let n = oscillations * spo;
    let h = 1.0 / n as f64;
    let parts: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t0 = i as f64 * h;
            GAUSS.iter().fold((0.0, 0.0), |acc, &(node, weight)| {
                let (a, b) = s.dz_parts(t0 + node * h, w);
                (acc.0 + weight * h * a, acc.1 + weight * h * b)
            })
        })
        .collect();
    let (ia, ib): (f64, f64) = parts.iter().fold((0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1));
    let delta = -ia / ib;
    let z0 = s.base(0.0).x[2];
    let mut points = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let (mut ca, mut cb) = (0.0, 0.0);
    for (i, part) in parts.iter().enumerate() {
        let t = i as f64 * h;
        let b = s.base(t);
        let (sn, cs) = (w * t).sin_cos();
        let p = b.p0 + delta;
        let x = b.x[0] + s.q * cs;
        let y = b.x[1] + p * sn / w;
        let dx = b.dx[0] - s.q * w * sn;
        let dy = b.dx[1] + p * cs + b.dp0 * sn / w;
        let z = z0 + ca + delta * cb;
        points.push([x, y, z]);
        tangents.push([dx, dy, -x * dy]);
        ca += part.0;
        cb += part.1;
    }
    SpaceCurve { points, tangents }
}

/// Approximates a closed polyline by a Legendrian knot within Hausdorff
/// distance `epsilon`.
pub fn legendrian_approximate(
    polyline: &[[f64; 3]],
    epsilon: f64,
    opts: &ApproxOptions,
) -> Result<Approximation, ApproxError> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(ApproxError::Epsilon(epsilon));
    }
    let poly = clean(polyline)?;

    if slope_mismatch(&poly) <= opts.legendrian_tol {
        let front: Vec<[f64; 2]> = poly.iter().map(|p| [p[1], p[2]]).collect();
        if let Ok(word) = sweep_front(&front) {
            for density in [8, 16, 32, 64] {
                let curve = to_space_curve(&word, density)?;
                let d = hausdorff(&curve.points, &poly);
                if d < epsilon && word.len() <= opts.max_events {
                    return Ok(Approximation {
                        legendrian_residual: curve.legendrian_residual(),
                        word,
                        curve,
                        hausdorff: d,
                        modes: 0,
                        oscillations: 0,
                        legendrian_input: true,
                    });
                }
            }
        }
    }

    let f = Fourier::fit(&poly, opts.max_modes.max(1));
    let mut modes = opts.max_modes.max(1);
    for k in 1..=opts.max_modes.max(1) {
        let smooth: Vec<[f64; 3]> = (0..1024).map(|i| f.eval(i as f64 / 1024.0, k)[0]).collect();
        if hausdorff(&smooth, &poly) <= 0.25 * epsilon {
            modes = k;
            break;
        }
    }
    let s = Smooth {
        f: &f,
        modes,
        q: 0.45 * epsilon,
    };
    let p_max = (0..4096).map(|i| s.base(i as f64 / 4096.0).p0.abs()).fold(0.0, f64::max);
    let spo = opts.samples_per_oscillation.max(8);
    let mut oscillations = ((p_max / (2.0 * PI * 0.35 * epsilon)).ceil() as usize).max(8);
    let mut best = f64::INFINITY;
    loop {
        if oscillations * 2 > opts.max_events {
            return Err(ApproxError::Unreachable {
                epsilon,
                achieved: best,
                max_events: opts.max_events,
            });
        }
        let curve = build_curve(&s, oscillations, spo);
        let d = hausdorff(&curve.points, &poly);
        best = best.min(d);
        if d < epsilon {
            let front: Vec<[f64; 2]> = curve.points.iter().map(|p| [p[1], p[2]]).collect();
            match sweep_front(&front) {
                Ok(word) if word.len() <= opts.max_events => {
                    return Ok(Approximation {
                        legendrian_residual: curve.legendrian_residual(),
                        word,
                        curve,
                        hausdorff: d,
                        modes,
                        oscillations,
                        legendrian_input: false,
                    })
                }
                Ok(word) => {
                    return Err(ApproxError::Unreachable {
                        epsilon,
                        achieved: d.min(best),
                        max_events: opts.max_events.min(word.len()),
                    })
                }
                // a non-generic sample configuration; perturb the frequency
                Err(_) => oscillations += 1,
            }
        } else {
            oscillations = oscillations * 3 / 2 + 1;
        }
    }
}

/// Y-monotone piece of a front between two cusps, stored by increasing `y`.
struct Chain {
    pts: Vec<[f64; 2]>,
    start: usize,
    end: usize,
}

impl Chain {
    fn z_at(&self, y: f64) -> f64 {
        let i = self.pts.partition_point(|p| p[0] < y);
        if i == 0 {
            return self.pts[0][1];
        }
        if i >= self.pts.len() {
            return self.pts[self.pts.len() - 1][1];
        }
        let (a, b) = (self.pts[i - 1], self.pts[i]);
        let t = (y - a[0]) / (b[0] - a[0]);
        a[1] + t * (b[1] - a[1])
    }
}

#[derive(Clone, Copy, Debug)]
enum SweepEvent {
    Left { y: f64, z: f64, upper: usize, lower: usize },
    Right { y: f64, a: usize, b: usize },
    Cross { y: f64, a: usize, b: usize },
}

impl SweepEvent {
    fn y(&self) -> f64 {
        match *self {
            SweepEvent::Left { y, .. } | SweepEvent::Right { y, .. } | SweepEvent::Cross { y, .. } => y,
        }
    }
}

fn degenerate(msg: &str) -> FrontError {
    FrontError::new(Rule::Degenerate, None, msg.to_string())
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Reads the event word off a closed front curve given as `(y, z)` samples.
pub fn sweep_front(points: &[[f64; 2]]) -> Result<FrontWord, FrontError> {
    let n = points.len();
    if n < 3 {
        return Err(degenerate("front needs at least 3 samples"));
    }
    let dy: Vec<f64> = (0..n).map(|i| points[(i + 1) % n][0] - points[i][0]).collect();
    if dy.iter().any(|&d| d == 0.0) {
        return Err(degenerate("front has a vertical or repeated segment"));
    }
    let cusps: Vec<usize> = (0..n).filter(|&i| (dy[(i + n - 1) % n] > 0.0) != (dy[i] > 0.0)).collect();
    if cusps.len() < 2 {
        return Err(degenerate("front has no cusps"));
    }

    let mut chains = Vec::with_capacity(cusps.len());
    for (c, &v) in cusps.iter().enumerate() {
        let w = cusps[(c + 1) % cusps.len()];
        let steps = (w + n - v) % n;
        let mut pts: Vec<[f64; 2]> = (0..=steps).map(|s| points[(v + s) % n]).collect();
        let (mut start, mut end) = (v, w);
        if dy[v] < 0.0 {
            pts.reverse();
            std::mem::swap(&mut start, &mut end);
        }
        chains.push(Chain { pts, start, end });
    }

    let mut events = Vec::new();
    let mut starting: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut ending: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in chains.iter().enumerate() {
        starting.entry(c.start).or_default().push(i);
        ending.entry(c.end).or_default().push(i);
    }
    for (&v, list) in &starting {
        let &[a, b] = list.as_slice() else {
            return Err(degenerate("left cusp is not shared by two branches"));
        };
        let y = chains[a].pts[1][0].min(chains[b].pts[1][0]);
        let (upper, lower) = if chains[a].z_at(y) > chains[b].z_at(y) { (a, b) } else { (b, a) };
        events.push(SweepEvent::Left {
            y: points[v][0],
            z: points[v][1],
            upper,
            lower,
        });
    }
    for (&v, list) in &ending {
        let &[a, b] = list.as_slice() else {
            return Err(degenerate("right cusp is not shared by two branches"));
        };
        events.push(SweepEvent::Right { y: points[v][0], a, b });
    }
    events.extend(crossings(&chains));
    events.sort_by(|a, b| a.y().total_cmp(&b.y()));

    let mut active: Vec<usize> = Vec::new();
    let mut word = Vec::with_capacity(events.len());
    let slot_of = |active: &[usize], c: usize| active.iter().position(|&x| x == c);
    for ev in events {
        match ev {
            SweepEvent::Left { y, z, upper, lower } => {
                let above: Vec<bool> = active.iter().map(|&c| chains[c].z_at(y) > z).collect();
                let k = above.iter().take_while(|&&a| a).count();
                if above[k..].iter().any(|&a| a) {
                    return Err(degenerate("strands out of order at a left cusp"));
                }
                active.insert(k, lower);
                active.insert(k, upper);
                word.push(Event::LeftCusp(k + 1));
            }
            SweepEvent::Right { a, b, .. } => {
                let (Some(i), Some(j)) = (slot_of(&active, a), slot_of(&active, b)) else {
                    return Err(degenerate("right cusp on inactive strands"));
                };
                if i.abs_diff(j) != 1 {
                    return Err(degenerate("right cusp branches are not adjacent"));
                }
                let k = i.min(j);
                active.drain(k..k + 2);
                word.push(Event::RightCusp(k + 1));
            }
            SweepEvent::Cross { a, b, .. } => {
                let (Some(i), Some(j)) = (slot_of(&active, a), slot_of(&active, b)) else {
                    return Err(degenerate("crossing on inactive strands"));
                };
                if i.abs_diff(j) != 1 {
                    return Err(degenerate("crossing strands are not adjacent"));
                }
                active.swap(i, j);
                word.push(Event::Crossing(i.min(j) + 1));
            }
        }
    }
    FrontWord::new(word)
}

/// Transverse intersections between different chains, found through a
/// uniform grid and reported once per chain pair and point.
fn crossings(chains: &[Chain]) -> Vec<SweepEvent> {
    let mut segs: Vec<(usize, [f64; 2], [f64; 2])> = Vec::new();
    for (c, chain) in chains.iter().enumerate() {
        for w in chain.pts.windows(2) {
            segs.push((c, w[0], w[1]));
        }
    }
    let mut lengths: Vec<f64> = segs.iter().map(|s| (s.2[0] - s.1[0]).abs().max((s.2[1] - s.1[1]).abs())).collect();
    lengths.sort_by(f64::total_cmp);
    let cell = (2.0 * lengths[lengths.len() / 2]).max(1e-9);
    let key = |p: [f64; 2]| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in segs.iter().enumerate() {
        let lo = key([s.1[0].min(s.2[0]), s.1[1].min(s.2[1])]);
        let hi = key([s.1[0].max(s.2[0]), s.1[1].max(s.2[1])]);
        for gx in lo.0..=hi.0 {
            for gy in lo.1..=hi.1 {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let mut found: Vec<(usize, usize, [f64; 2])> = Vec::new();
    for (&g, list) in &grid {
        for (ii, &i) in list.iter().enumerate() {
            for &j in &list[ii + 1..] {
                let (ci, p0, p1) = segs[i];
                let (cj, q0, q1) = segs[j];
                if ci == cj {
                    continue;
                }
                let r = [p1[0] - p0[0], p1[1] - p0[1]];
                let s = [q1[0] - q0[0], q1[1] - q0[1]];
                let denom = cross2(r, s);
                if denom == 0.0 {
                    continue;
                }
                let d = [q0[0] - p0[0], q0[1] - p0[1]];
                let t = cross2(d, s) / denom;
                let u = cross2(d, r) / denom;
                if !((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)) {
                    continue;
                }
                let x = [p0[0] + t * r[0], p0[1] + t * r[1]];
                if key(x) != g {
                    continue;
                }
                // shared cusp endpoints are not crossings
                let near = |a: [f64; 2], b: [f64; 2]| (a[0] - b[0]).abs() + (a[1] - b[1]).abs() <= 1e-12 * (1.0 + a[0].abs() + a[1].abs());
                let (a, b) = (&chains[ci], &chains[cj]);
                if (a.start == b.start && near(x, a.pts[0])) || (a.end == b.end && near(x, a.pts[a.pts.len() - 1])) {
                    continue;
                }
                let pair = (ci.min(cj), ci.max(cj));
                found.push((pair.0, pair.1, x));
            }
        }
    }
    // a crossing at a shared sample shows up on neighbouring segments
    found.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.2[0].total_cmp(&b.2[0])));
    let mut out: Vec<SweepEvent> = Vec::new();
    let mut last: Option<(usize, usize, [f64; 2])> = None;
    for f in found {
        if let Some(l) = last {
            if l.0 == f.0 && l.1 == f.1 && (l.2[0] - f.2[0]).abs() + (l.2[1] - f.2[1]).abs() < 1e-9 {
                continue;
            }
        }
        out.push(SweepEvent::Cross { y: f.2[0], a: f.0, b: f.1 });
        last = Some(f);
    }
    out
}
