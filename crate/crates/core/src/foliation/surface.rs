use serde::{Deserialize, Serialize};

use crate::contact::Domain;
use crate::expr::{parse_expression, point_uv, Compiled, Expr, Var};

use super::FoliationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Disk,
    Sphere,
    Torus,
    Annulus,
}

impl Topology {
    pub fn euler_characteristic(self) -> i32 {
        match self {
            Topology::Sphere => 2,
            Topology::Disk => 1,
            Topology::Torus | Topology::Annulus => 0,
        }
    }

    pub fn is_closed(self) -> bool {
        matches!(self, Topology::Sphere | Topology::Torus)
    }
}

/// Surface description as read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub sigma: [String; 3],
    pub periodic: [bool; 2],
    pub topology: Topology,
    #[serde(default)]
    pub degenerate_points: Vec<[f64; 2]>,
}

/// A chart edge along which the map is constant (a pole or a polar center).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollapsedEdge {
    /// 0 for a `u = const` edge, 1 for `v = const`.
    pub axis: usize,
    /// 0.0 or 1.0.
    pub at: f64,
    pub point: [f64; 3],
}

/// Parametrized surface `sigma: [0,1]^2 -> R^3`, oriented by `(sigma_u, sigma_v)`.
#[derive(Clone, Debug)]
pub struct Surface {
    sigma: [Expr; 3],
    periodic: [bool; 2],
    topology: Topology,
    degenerate_points: Vec<[f64; 2]>,
    collapsed: Vec<CollapsedEdge>,
    compiled: [Compiled; 3],
    tangents: [[Compiled; 3]; 2],
}

pub const IMMERSION_TOL: f64 = 1e-8;
pub const PERIODIC_TOL: f64 = 1e-9;

impl Surface {
    pub fn new(
        sigma: [Expr; 3],
        periodic: [bool; 2],
        topology: Topology,
        degenerate_points: Vec<[f64; 2]>,
    ) -> Result<Self, FoliationError> {
        for e in &sigma {
            for v in [Var::X, Var::Y, Var::Z, Var::T] {
                if e.depends_on(v) {
                    return Err(FoliationError::Surface(format!(
                        "chart expression {e} depends on {}",
                        v.name()
                    )));
                }
            }
        }
        let compiled = [sigma[0].compile(), sigma[1].compile(), sigma[2].compile()];
        let tangents = [Var::U, Var::V].map(|w| {
            [
                sigma[0].diff(w).compile(),
                sigma[1].diff(w).compile(),
                sigma[2].diff(w).compile(),
            ]
        });
        let mut s = Surface {
            sigma,
            periodic,
            topology,
            degenerate_points,
            collapsed: Vec::new(),
            compiled,
            tangents,
        };
        s.collapsed = s.find_collapsed_edges();
        Ok(s)
    }

    pub fn from_spec(spec: &SurfaceSpec) -> Result<Self, FoliationError> {
        let mut sigma = Vec::with_capacity(3);
        for (i, text) in spec.sigma.iter().enumerate() {
            let e = parse_expression(text).map_err(|e| FoliationError::Parse {
                field: format!("sigma[{i}]"),
                source: e,
            })?;
            sigma.push(e);
        }
        let sigma: [Expr; 3] = sigma.try_into().expect("three components");
        Surface::new(sigma, spec.periodic, spec.topology, spec.degenerate_points.clone())
    }

    pub fn to_spec(&self) -> SurfaceSpec {
        SurfaceSpec {
            sigma: self.sigma.clone().map(|e| e.to_string()),
            periodic: self.periodic,
            topology: self.topology,
            degenerate_points: self.degenerate_points.clone(),
        }
    }

    pub fn sigma(&self) -> &[Expr; 3] {
        &self.sigma
    }

    pub fn periodic(&self) -> [bool; 2] {
        self.periodic
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn degenerate_points(&self) -> &[[f64; 2]] {
        &self.degenerate_points
    }

    pub fn collapsed_edges(&self) -> &[CollapsedEdge] {
        &self.collapsed
    }

    pub fn point(&self, u: f64, v: f64) -> [f64; 3] {
        let p = point_uv(u, v);
        self.compiled.each_ref().map(|c| c.eval_lenient(&p))
    }

    pub fn partials(&self, u: f64, v: f64) -> [[f64; 3]; 2] {
        let p = point_uv(u, v);
        self.tangents.each_ref().map(|t| t.each_ref().map(|c| c.eval_lenient(&p)))
    }

    /// `sigma_u x sigma_v`.
    pub fn normal(&self, u: f64, v: f64) -> [f64; 3] {
        let [a, b] = self.partials(u, v);
        cross(a, b)
    }

    /// Wraps periodic coordinates into `[0, 1)`.
    pub fn wrap(&self, q: [f64; 2]) -> [f64; 2] {
        let mut out = q;
        for i in 0..2 {
            if self.periodic[i] {
                out[i] = q[i].rem_euclid(1.0);
            }
        }
        out
    }

    /// Chart displacement from `a` to `b`, using the nearest periodic image.
    pub fn chart_delta(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut d = [b[0] - a[0], b[1] - a[1]];
        for (i, di) in d.iter_mut().enumerate() {
            if self.periodic[i] {
                *di -= di.round();
            }
        }
        d
    }

    pub fn chart_distance(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let d = self.chart_delta(a, b);
        d[0].hypot(d[1])
    }

    /// True if `q` lies in the chart square up to `slack` on non-periodic axes.
    pub fn in_chart(&self, q: [f64; 2], slack: f64) -> bool {
        (0..2).all(|i| self.periodic[i] || (q[i] >= -slack && q[i] <= 1.0 + slack))
    }

    fn find_collapsed_edges(&self) -> Vec<CollapsedEdge> {
        let mut out = Vec::new();
        for axis in 0..2 {
            if self.periodic[axis] {
                continue;
            }
            for at in [0.0, 1.0] {
                let samples: Vec<[f64; 3]> = (0..=16)
                    .map(|k| {
                        let t = k as f64 / 16.0;
                        if axis == 0 {
                            self.point(at, t)
                        } else {
                            self.point(t, at)
                        }
                    })
                    .collect();
                let p0 = samples[0];
                let spread = samples.iter().map(|p| dist3(*p, p0)).fold(0.0, f64::max);
                if spread < 1e-9 && p0.iter().all(|c| c.is_finite()) {
                    out.push(CollapsedEdge { axis, at, point: p0 });
                }
            }
        }
        out
    }

    /// Collapsed edge containing chart point `q` within `tol`, if any.
    pub fn collapsed_edge_near(&self, q: [f64; 2], tol: f64) -> Option<&CollapsedEdge> {
        self.collapsed.iter().find(|e| (q[e.axis] - e.at).abs() <= tol)
    }

    /// Checks immersion away from declared and collapsed points, and that
    /// periodic edges agree up to the lattice of `domain`.
    pub fn validate(&self, domain: Option<&Domain>, grid: usize) -> Result<(), FoliationError> {
        let n = grid.max(8);
        let guard = 2.0 / n as f64;
        for i in 0..n {
            for j in 0..n {
                let q = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
                if self.collapsed_edge_near(q, guard).is_some()
                    || self.degenerate_points.iter().any(|d| self.chart_distance(*d, q) <= guard)
                {
                    continue;
                }
                let nu = self.normal(q[0], q[1]);
                let len = norm(nu);
                if !(len > IMMERSION_TOL) {
                    return Err(FoliationError::NotImmersed { chart: q });
                }
            }
        }
        let lattice = [
            0.0,
            domain.and_then(|d| d.period_y).unwrap_or(0.0),
            domain.and_then(|d| d.period_z).unwrap_or(0.0),
        ];
        for axis in 0..2 {
            if !self.periodic[axis] {
                continue;
            }
            for k in 0..=16 {
                let t = k as f64 / 16.0;
                let (a, b) = if axis == 0 {
                    (self.point(0.0, t), self.point(1.0, t))
                } else {
                    (self.point(t, 0.0), self.point(t, 1.0))
                };
                for c in 0..3 {
                    let mut d = b[c] - a[c];
                    if lattice[c] > 0.0 {
                        d -= (d / lattice[c]).round() * lattice[c];
                    }
                    if d.abs() > PERIODIC_TOL {
                        return Err(FoliationError::Periodicity { axis, at: t });
                    }
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist3(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm([a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// Ready-made charts used by examples and tests.
pub mod examples {
    use super::*;

    fn parse(s: &str) -> Expr {
        parse_expression(s).expect("example chart parses")
    }

    fn make(sigma: [&str; 3], periodic: [bool; 2], topology: Topology) -> Surface {
        Surface::new(sigma.map(parse), periodic, topology, Vec::new()).expect("example chart")
    }

    /// Unit sphere with poles at the `u = 0` and `u = 1` edges.
    pub fn sphere() -> Surface {
        make(
            ["sin(pi*u)*cos(2*pi*v)", "sin(pi*u)*sin(2*pi*v)", "cos(pi*u)"],
            [false, true],
            Topology::Sphere,
        )
    }

    /// Unit sphere with chart poles on the x-axis, so that the z-axis poles
    /// are interior chart points.
    pub fn sphere_x_poles() -> Surface {
        make(
            ["cos(pi*u)", "sin(pi*u)*cos(2*pi*v)", "sin(pi*u)*sin(2*pi*v)"],
            [false, true],
            Topology::Sphere,
        )
    }

    /// `{x = sin(2 pi z)}` in the quotient by unit `y` and `z` translations.
    pub fn torus_sine() -> Surface {
        make(["sin(2*pi*v)", "u", "v"], [true, true], Topology::Torus)
    }

    /// Flat disk of radius `pi` in polar coordinates.
    pub fn flat_disk() -> Surface {
        make(["pi*u*cos(2*pi*v)", "pi*u*sin(2*pi*v)", "0"], [false, true], Topology::Disk)
    }

    /// Disk of radius `pi` with its interior raised to height `eps`.
    pub fn pushed_disk(eps: f64) -> Surface {
        let z = format!("{eps:?}*(1 - u^2)");
        make(["pi*u*cos(2*pi*v)", "pi*u*sin(2*pi*v)", &z], [false, true], Topology::Disk)
    }

    /// Unit disk on the paraboloid `z = eps r^2`.
    pub fn paraboloid_disk(eps: f64) -> Surface {
        let z = format!("{eps:?}*u^2");
        make(["u*cos(2*pi*v)", "u*sin(2*pi*v)", &z], [false, true], Topology::Disk)
    }
}
