use rayon::prelude::*;
use serde::Serialize;

use super::pullback::PulledBackForm;
use super::surface::{cross, dot, norm, Surface};
use super::{FoliationError, FoliationOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularityKind {
    Elliptic,
    Hyperbolic,
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SingularitySign {
    Positive,
    Negative,
    Undetermined,
}

impl SingularitySign {
    fn from_value(s: f64, tol: f64) -> Self {
        if s > tol {
            SingularitySign::Positive
        } else if s < -tol {
            SingularitySign::Negative
        } else {
            SingularitySign::Undetermined
        }
    }

    pub fn flip(self) -> Self {
        match self {
            SingularitySign::Positive => SingularitySign::Negative,
            SingularitySign::Negative => SingularitySign::Positive,
            SingularitySign::Undetermined => SingularitySign::Undetermined,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowType {
    Source,
    Sink,
}

/// Linearization of the directing field at a zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Eigen {
    pub det: f64,
    pub trace: f64,
    /// `[re, im]` pairs.
    pub eigenvalues: [[f64; 2]; 2],
}

impl Eigen {
    pub fn from_matrix(m: [[f64; 2]; 2]) -> Self {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let trace = m[0][0] + m[1][1];
        let disc = trace * trace / 4.0 - det;
        let eigenvalues = if disc >= 0.0 {
            let s = disc.sqrt();
            [[trace / 2.0 + s, 0.0], [trace / 2.0 - s, 0.0]]
        } else {
            let s = (-disc).sqrt();
            [[trace / 2.0, s], [trace / 2.0, -s]]
        };
        Eigen {
            det,
            trace,
            eigenvalues,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Singularity {
    pub chart: [f64; 2],
    pub point: [f64; 3],
    pub kind: SingularityKind,
    pub sign: SingularitySign,
    /// Present for elliptic points.
    pub flow: Option<FlowType>,
    pub eigen: Eigen,
    /// Poincare index from the loop method, or the sign of `det DW`.
    pub index: i32,
    /// `"newton"` for chart zeros, `"loop"` for chart-degenerate points.
    pub method: &'static str,
    /// `alpha(nu) / (|alpha| |nu|)`.
    pub alignment: f64,
}

/// A connected cluster of zeros with singular linearization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegenerateLocus {
    pub chart_points: Vec<[f64; 2]>,
    pub points: Vec<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularSet {
    pub singularities: Vec<Singularity>,
    pub degenerate_loci: Vec<DegenerateLocus>,
    /// Candidate cells whose Newton iteration did not converge.
    pub newton_failures: usize,
}

/// Locates and classifies the zeros of the directing field.
pub fn find_singularities(
    pb: &PulledBackForm,
    surface: &Surface,
    opts: &FoliationOptions,
) -> Result<SingularSet, FoliationError> {
    opts.validate()?;
    let n = opts.grid;
    let nodes: Vec<[f64; 2]> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| [i as f64 / n as f64, j as f64 / n as f64]))
        .collect();
    let values: Vec<[f64; 2]> = nodes.par_iter().map(|q| pb.w_at(*q)).collect();
    let scale = values
        .iter()
        .flat_map(|w| w.iter())
        .filter(|c| c.is_finite())
        .fold(0.0f64, |m, c| m.max(c.abs()));
    let tiny = 1e-12 * (1.0 + scale);
    let at = |i: usize, j: usize| values[i * (n + 1) + j];

    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            let brackets = (0..2).all(|c| {
                let lo = corners.iter().map(|w| w[c]).fold(f64::INFINITY, f64::min);
                let hi = corners.iter().map(|w| w[c]).fold(f64::NEG_INFINITY, f64::max);
                lo <= tiny && hi >= -tiny
            });
            if brackets {
                cells.push([(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
            }
        }
    }

    let results: Vec<Option<[f64; 2]>> = cells.par_iter().map(|q| newton(pb, surface, *q, opts)).collect();
    let newton_failures = results.iter().filter(|r| r.is_none()).count();

    let excluded = |q: [f64; 2]| {
        surface.collapsed_edge_near(q, opts.loop_radius).is_some()
            || surface
                .degenerate_points()
                .iter()
                .any(|d| surface.chart_distance(*d, q) < opts.loop_radius)
    };
    let mut zeros: Vec<[f64; 2]> = Vec::new();
    for q in results.into_iter().flatten() {
        if excluded(q) {
            continue;
        }
        if zeros.iter().all(|z| surface.chart_distance(*z, q) > 1e-7) {
            zeros.push(q);
        }
    }
    zeros.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));

    let mut singularities = Vec::new();
    let mut degenerate = Vec::new();
    for q in zeros {
        let eigen = Eigen::from_matrix(pb.jacobian_at(q));
        if eigen.det.abs() <= opts.kind_tol {
            degenerate.push(q);
            continue;
        }
        let alignment = alignment_at(pb, surface, q, surface.normal(q[0], q[1]));
        singularities.push(classify(q, surface.point(q[0], q[1]), eigen, alignment, "newton", opts));
    }

    let mut loci = Vec::new();
    for cluster in cluster_points(surface, degenerate, 2.5 / n as f64) {
        if cluster.len() == 1 {
            let q = cluster[0];
            let eigen = Eigen::from_matrix(pb.jacobian_at(q));
            let alignment = alignment_at(pb, surface, q, surface.normal(q[0], q[1]));
            singularities.push(Singularity {
                chart: q,
                point: surface.point(q[0], q[1]),
                kind: SingularityKind::Degenerate,
                sign: SingularitySign::from_value(alignment, opts.sign_tol),
                flow: None,
                eigen,
                index: 0,
                method: "newton",
                alignment,
            });
        } else {
            loci.push(DegenerateLocus {
                points: cluster.iter().map(|q| surface.point(q[0], q[1])).collect(),
                chart_points: cluster,
            });
        }
    }

    for edge in surface.collapsed_edges() {
        let other = 1 - edge.axis;
        if !surface.periodic()[other] {
            continue;
        }
        let off = if edge.at == 0.0 { opts.loop_radius } else { 1.0 - opts.loop_radius };
        let mut center = [0.0; 2];
        center[edge.axis] = edge.at;
        let lp: Vec<[f64; 2]> = (0..opts.loop_samples)
            .map(|k| {
                let t = k as f64 / opts.loop_samples as f64;
                let mut q = [0.0; 2];
                q[edge.axis] = off;
                q[other] = t;
                q
            })
            .collect();
        if let Some(s) = loop_singularity(pb, surface, center, edge.point, &lp, opts) {
            singularities.push(s);
        }
    }
    for &d in surface.degenerate_points() {
        if surface.collapsed_edge_near(d, 1e-12).is_some() {
            continue;
        }
        let lp: Vec<[f64; 2]> = (0..opts.loop_samples)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / opts.loop_samples as f64;
                [d[0] + opts.loop_radius * t.cos(), d[1] + opts.loop_radius * t.sin()]
            })
            .collect();
        if let Some(s) = loop_singularity(pb, surface, d, surface.point(d[0], d[1]), &lp, opts) {
            singularities.push(s);
        }
    }

    Ok(SingularSet {
        singularities,
        degenerate_loci: loci,
        newton_failures,
    })
}

fn newton(pb: &PulledBackForm, surface: &Surface, start: [f64; 2], opts: &FoliationOptions) -> Option<[f64; 2]> {
    let mut q = start;
    let max_step = 0.25;
    for _ in 0..opts.newton_max_iter {
        let w = pb.w_at(q);
        if !(w[0].is_finite() && w[1].is_finite()) {
            return None;
        }
        if w[0].hypot(w[1]) < opts.newton_tol {
            return Some(surface.wrap(q));
        }
        let j = pb.jacobian_at(q);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let fro2 = j.iter().flatten().map(|x| x * x).sum::<f64>();
        if !(fro2 > 0.0) || !fro2.is_finite() {
            return None;
        }
        let mut d = if det.abs() > 1e-10 * fro2 {
            [
                -(j[1][1] * w[0] - j[0][1] * w[1]) / det,
                -(-j[1][0] * w[0] + j[0][0] * w[1]) / det,
            ]
        } else {
            // minimum-norm step for a rank-one Jacobian
            [
                -(j[0][0] * w[0] + j[1][0] * w[1]) / fro2,
                -(j[0][1] * w[0] + j[1][1] * w[1]) / fro2,
            ]
        };
        let len = d[0].hypot(d[1]);
        if len > max_step {
            d = [d[0] * max_step / len, d[1] * max_step / len];
        }
        q = [q[0] + d[0], q[1] + d[1]];
        for (i, qi) in q.iter_mut().enumerate() {
            if !surface.periodic()[i] {
                *qi = qi.clamp(0.0, 1.0);
            }
        }
    }
    let w = pb.w_at(q);
    (w[0].hypot(w[1]) < opts.newton_tol).then(|| surface.wrap(q))
}

fn alignment_at(pb: &PulledBackForm, _surface: &Surface, q: [f64; 2], nu: [f64; 3]) -> f64 {
    match pb.covector_at(q) {
        Some(a) => {
            let d = norm(a) * norm(nu);
            if d > 0.0 {
                dot(a, nu) / d
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

fn classify(
    chart: [f64; 2],
    point: [f64; 3],
    eigen: Eigen,
    alignment: f64,
    method: &'static str,
    opts: &FoliationOptions,
) -> Singularity {
    let (kind, flow) = if eigen.det < -opts.kind_tol {
        (SingularityKind::Hyperbolic, None)
    } else if eigen.det > opts.kind_tol && eigen.trace.abs() > opts.kind_tol {
        let flow = if eigen.trace > 0.0 { FlowType::Source } else { FlowType::Sink };
        (SingularityKind::Elliptic, Some(flow))
    } else {
        (SingularityKind::Degenerate, None)
    };
    Singularity {
        chart,
        point,
        kind,
        sign: SingularitySign::from_value(alignment, opts.sign_tol),
        flow,
        eigen,
        index: if eigen.det > 0.0 { 1 } else { -1 },
        method,
        alignment,
    }
}

/// Classifies a chart-degenerate point from the intrinsic field
/// `sigma_* W / |nu|` sampled on a surrounding loop.
fn loop_singularity(
    pb: &PulledBackForm,
    surface: &Surface,
    chart: [f64; 2],
    center: [f64; 3],
    lp: &[[f64; 2]],
    opts: &FoliationOptions,
) -> Option<Singularity> {
    let mut n_acc = [0.0; 3];
    let mut samples = Vec::with_capacity(lp.len());
    for &q in lp {
        let [su, sv] = surface.partials(q[0], q[1]);
        let nu = cross(su, sv);
        let len = norm(nu);
        if !(len > 0.0) {
            return None;
        }
        for i in 0..3 {
            n_acc[i] += nu[i] / len;
        }
        let w = pb.w_at(q);
        let v = [0, 1, 2].map(|i| (w[0] * su[i] + w[1] * sv[i]) / len);
        samples.push((surface.point(q[0], q[1]), v));
    }
    let nl = norm(n_acc);
    let n = n_acc.map(|c| c / nl);
    let a = pb.covector_at(chart)?;
    let al = norm(a);
    let tangency = norm(cross(a, n)) / al;
    let alignment = dot(a, n) / al;

    let seed = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let t1 = {
        let c = cross(n, seed);
        let l = norm(c);
        c.map(|x| x / l)
    };
    let t2 = cross(n, t1);
    let pts: Vec<([f64; 2], [f64; 2])> = samples
        .iter()
        .map(|(p, v)| {
            let r = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
            ([dot(r, t1), dot(r, t2)], [dot(*v, t1), dot(*v, t2)])
        })
        .collect();
    let w_loop = winding(pts.iter().map(|(r, _)| *r));
    let w_field = winding(pts.iter().map(|(_, v)| *v));
    if w_loop == 0 {
        return None;
    }
    let index = w_field * w_loop.signum();

    // least-squares fit v = M r
    let mut rr = [[0.0; 2]; 2];
    let mut vr = [[0.0; 2]; 2];
    for (r, v) in &pts {
        for i in 0..2 {
            for j in 0..2 {
                rr[i][j] += r[i] * r[j];
                vr[i][j] += v[i] * r[j];
            }
        }
    }
    let d = rr[0][0] * rr[1][1] - rr[0][1] * rr[1][0];
    let inv = [[rr[1][1] / d, -rr[0][1] / d], [-rr[1][0] / d, rr[0][0] / d]];
    let mut m = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = vr[i][0] * inv[0][j] + vr[i][1] * inv[1][j];
        }
    }
    let eigen = Eigen::from_matrix(m);

    if tangency > opts.tangency_tol && index == 0 {
        return None;
    }
    let mut s = classify(chart, center, eigen, alignment, "loop", opts);
    s.index = index;
    let consistent = tangency <= opts.tangency_tol
        && match s.kind {
            SingularityKind::Elliptic => index == 1,
            SingularityKind::Hyperbolic => index == -1,
            SingularityKind::Degenerate => true,
        };
    if !consistent {
        s.kind = SingularityKind::Degenerate;
        s.flow = None;
    }
    Some(s)
}

fn winding(points: impl Iterator<Item = [f64; 2]>) -> i32 {
    let angles: Vec<f64> = points.map(|p| p[1].atan2(p[0])).collect();
    if angles.is_empty() {
        return 0;
    }
    let mut total = 0.0;
    for k in 0..angles.len() {
        let mut d = angles[(k + 1) % angles.len()] - angles[k];
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
    }
    (total / std::f64::consts::TAU).round() as i32
}

/// Single-linkage clustering in the periodic chart metric.
fn cluster_points(surface: &Surface, pts: Vec<[f64; 2]>, link: f64) -> Vec<Vec<[f64; 2]>> {
    let mut label: Vec<Option<usize>> = vec![None; pts.len()];
    let mut clusters = Vec::new();
    for start in 0..pts.len() {
        if label[start].is_some() {
            continue;
        }
        let id = clusters.len();
        label[start] = Some(id);
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(pts[i]);
            for j in 0..pts.len() {
                if label[j].is_none() && surface.chart_distance(pts[i], pts[j]) <= link {
                    label[j] = Some(id);
                    stack.push(j);
                }
            }
        }
        members.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        clusters.push(members);
    }
    clusters
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

    fn xi2() -> ContactForm {
        ContactForm::assume(rotational_alpha(), Domain::cube(-2.0, 2.0)).unwrap()
    }

    fn check_poles(set: &SingularSet) {
        assert_eq!(set.singularities.len(), 2, "{set:?}");
        assert!(set.degenerate_loci.is_empty());
        for s in &set.singularities {
            assert_eq!(s.kind, SingularityKind::Elliptic);
            assert!((s.point[0].abs() + s.point[1].abs() + (s.point[2].abs() - 1.0).abs()) < 1e-6);
            let expected = if s.point[2] > 0.0 {
                (SingularitySign::Positive, FlowType::Source)
            } else {
                (SingularitySign::Negative, FlowType::Sink)
            };
            assert_eq!((s.sign, s.flow.unwrap()), expected);
        }
    }

    #[test]
    fn sphere_poles_by_loop() {
        let s = sphere();
        let set = find_singularities(&pullback(&xi2(), &s).unwrap(), &s, &opts()).unwrap();
        check_poles(&set);
        assert!(set.singularities.iter().all(|s| s.method == "loop"));
    }

    #[test]
    fn sphere_poles_by_newton() {
        let s = sphere_x_poles();
        let set = find_singularities(&pullback(&xi2(), &s).unwrap(), &s, &opts()).unwrap();
        check_poles(&set);
        assert!(set.singularities.iter().all(|s| s.method == "newton"));
    }

    #[test]
    fn xy_plane_has_a_line_of_zeros() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = Surface::new(
            ["2*u - 1", "2*v - 1", "0"].map(|t| t.parse().unwrap()),
            [false, false],
            Topology::Disk,
            vec![],
        )
        .unwrap();
        let set = find_singularities(&pullback(&c, &s).unwrap(), &s, &opts()).unwrap();
        assert!(set.singularities.is_empty());
        assert_eq!(set.degenerate_loci.len(), 1);
        let locus = &set.degenerate_loci[0];
        assert!(locus.chart_points.len() > 30);
        assert!(locus.chart_points.iter().all(|q| (q[0] - 0.5).abs() < 1e-9));
    }

    #[test]
    fn yz_plane_has_none() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = Surface::new(["0", "u", "v"].map(|t| t.parse().unwrap()), [false, false], Topology::Disk, vec![])
            .unwrap();
        let set = find_singularities(&pullback(&c, &s).unwrap(), &s, &opts()).unwrap();
        assert!(set.singularities.is_empty() && set.degenerate_loci.is_empty());
    }

    #[test]
    fn paraboloid_disk_has_one_positive_source() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let s = paraboloid_disk(0.1);
        let set = find_singularities(&pullback(&c, &s).unwrap(), &s, &opts()).unwrap();
        assert_eq!(set.singularities.len(), 1, "{set:?}");
        let p = &set.singularities[0];
        assert_eq!(p.kind, SingularityKind::Elliptic);
        assert_eq!(p.sign, SingularitySign::Positive);
        assert_eq!(p.flow, Some(FlowType::Source));
    }

    #[test]
    fn winding_numbers() {
        let circle = |k: i32| (0..32).map(move |i| {
            let t = k as f64 * std::f64::consts::TAU * i as f64 / 32.0;
            [t.cos(), t.sin()]
        });
        assert_eq!(winding(circle(1)), 1);
        assert_eq!(winding(circle(-1)), -1);
        assert_eq!(winding([[1.0, 0.0], [1.0, 0.1], [1.0, -0.1]].into_iter()), 0);
    }
}
