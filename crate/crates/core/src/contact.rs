//! Contact condition, kernel planes and contact vector fields.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{point_xyz, EvalError, Expr, Point, Var};
use crate::forms::{DifferentialForm, FormError};

/// Axis-aligned box in R^3, optionally with `y` and/or `z` identified
/// periodically. For a periodic axis only `[lo, lo + period)` is sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    #[serde(default)]
    pub period_y: Option<f64>,
    #[serde(default)]
    pub period_z: Option<f64>,
}

impl Domain {
    pub fn cube(lo: f64, hi: f64) -> Self {
        Domain {
            lo: [lo; 3],
            hi: [hi; 3],
            period_y: None,
            period_z: None,
        }
    }

    /// `x` in `[x_lo, x_hi]`, `y` and `z` taken modulo the given periods.
    pub fn quotient(x_lo: f64, x_hi: f64, period_y: f64, period_z: f64) -> Self {
        Domain {
            lo: [x_lo, 0.0, 0.0],
            hi: [x_hi, period_y, period_z],
            period_y: Some(period_y),
            period_z: Some(period_z),
        }
    }

    fn validate(&self) -> Result<(), ContactError> {
        for i in 0..3 {
            if !(self.lo[i].is_finite() && self.hi[i].is_finite() && self.lo[i] < self.hi[i]) {
                return Err(ContactError::BadDomain(format!("axis {i} has an empty or infinite range")));
            }
        }
        for p in [self.period_y, self.period_z].into_iter().flatten() {
            if !(p.is_finite() && p > 0.0) {
                return Err(ContactError::BadDomain(format!("period {p} must be positive")));
            }
        }
        Ok(())
    }

    fn periodic(&self, axis: usize) -> Option<f64> {
        match axis {
            1 => self.period_y,
            2 => self.period_z,
            _ => None,
        }
    }

    /// Grid coordinate `i` of `n` along `axis`; periodic axes drop the
    /// duplicated endpoint.
    pub fn node(&self, axis: usize, i: usize, n: usize) -> f64 {
        match self.periodic(axis) {
            Some(p) => self.lo[axis] + p * i as f64 / n as f64,
            None => self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / (n - 1) as f64,
        }
    }

    fn grid_points(&self, n: usize) -> Vec<([usize; 3], Point)> {
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let p = point_xyz(self.node(0, i, n), self.node(1, j, n), self.node(2, k, n));
                    out.push(([i, j, k], p));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridOptions {
    pub resolution: usize,
    pub tol: f64,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            resolution: 32,
            tol: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridFailure {
    pub index: [usize; 3],
    pub point: [f64; 3],
    pub value: f64,
}

/// Nodes where the volume coefficient fails the tolerance, in grid order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FailureReport {
    pub failure_count: usize,
    pub failures: Vec<GridFailure>,
    pub sign_change: bool,
    pub min: f64,
    pub max: f64,
    pub nodes: usize,
    pub resolution: usize,
    pub tol: f64,
}

/// Summary of a successful verification.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ContactSummary {
    pub min: f64,
    pub max: f64,
    pub min_abs: f64,
    pub sign: i8,
    pub nodes: usize,
    pub resolution: usize,
    pub tol: f64,
}

const MAX_LISTED_FAILURES: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("not a contact form: volume coefficient fails at {} of {} nodes", .0.failure_count, .0.nodes)]
    NotContact(Box<FailureReport>),
    #[error("expected a 1-form, got a {0}-form")]
    NotOneForm(usize),
    #[error("grid resolution {0} is below the minimum of 8")]
    Resolution(usize),
    #[error("invalid domain: {0}")]
    BadDomain(String),
    #[error("form is not invariant under the period of axis {axis} at {point:?}")]
    NotPeriodic { axis: usize, point: [f64; 3] },
    #[error("form vanishes at {0:?}")]
    DegenerateKernel([f64; 3]),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A 1-form verified to satisfy the contact condition on a domain.
#[derive(Clone, Debug)]
pub struct ContactForm {
    alpha: DifferentialForm,
    volume: DifferentialForm,
    domain: Domain,
    summary: ContactSummary,
}

impl ContactForm {
    pub fn alpha(&self) -> &DifferentialForm {
        &self.alpha
    }

    /// The cached 3-form `alpha ^ d alpha`.
    pub fn volume(&self) -> &DifferentialForm {
        &self.volume
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn summary(&self) -> &ContactSummary {
        &self.summary
    }

    /// Coefficient of `alpha ^ d alpha` relative to `dx^dy^dz` at `p`.
    pub fn volume_coefficient(&self, p: [f64; 3]) -> Result<f64, EvalError> {
        self.volume.coefficients()[0].try_eval(&point_xyz(p[0], p[1], p[2]))
    }

    /// Covector components of alpha at `p`.
    pub fn covector(&self, p: [f64; 3]) -> Result<[f64; 3], EvalError> {
        let v = self.alpha.eval(&point_xyz(p[0], p[1], p[2]))?;
        Ok([v[0], v[1], v[2]])
    }

    /// Wraps a form without verification; used for pullback experiments
    /// where the caller has already established the contact condition.
    pub fn assume(alpha: DifferentialForm, domain: Domain) -> Result<Self, ContactError> {
        if alpha.degree() != 1 {
            return Err(ContactError::NotOneForm(alpha.degree()));
        }
        let volume = alpha.wedge(&alpha.exterior_derivative()?)?;
        Ok(ContactForm {
            alpha,
            volume,
            domain,
            summary: ContactSummary {
                min: f64::NAN,
                max: f64::NAN,
                min_abs: f64::NAN,
                sign: 0,
                nodes: 0,
                resolution: 0,
                tol: 0.0,
            },
        })
    }
}

/// Samples the coefficient of `alpha ^ d alpha` over the domain grid.
pub fn check_contact(
    alpha: &DifferentialForm,
    domain: &Domain,
    opts: GridOptions,
) -> Result<ContactForm, ContactError> {
    if alpha.degree() != 1 {
        return Err(ContactError::NotOneForm(alpha.degree()));
    }
    if opts.resolution < 8 {
        return Err(ContactError::Resolution(opts.resolution));
    }
    domain.validate()?;
    check_periodicity(alpha, domain)?;

    let volume = alpha.wedge(&alpha.exterior_derivative()?)?;
    let coeff = volume.coefficients()[0].compile();
    let n = opts.resolution;
    let nodes = domain.grid_points(n);
    let values: Vec<Result<f64, EvalError>> = nodes.par_iter().map(|(_, p)| coeff.try_eval(p)).collect();

    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut min_abs = f64::INFINITY;
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for ((index, p), value) in nodes.iter().zip(values) {
        let value = value?;
        min = min.min(value);
        max = max.max(value);
        min_abs = min_abs.min(value.abs());
        if value.abs() <= opts.tol {
            failure_count += 1;
            if failures.len() < MAX_LISTED_FAILURES {
                failures.push(GridFailure {
                    index: *index,
                    point: [p[0], p[1], p[2]],
                    value,
                });
            }
        }
    }
    let sign_change = min < -opts.tol && max > opts.tol;
    if failure_count > 0 || sign_change {
        return Err(ContactError::NotContact(Box::new(FailureReport {
            failure_count,
            failures,
            sign_change,
            min,
            max,
            nodes: nodes.len(),
            resolution: n,
            tol: opts.tol,
        })));
    }
    Ok(ContactForm {
        alpha: alpha.clone(),
        volume,
        domain: domain.clone(),
        summary: ContactSummary {
            min,
            max,
            min_abs,
            sign: if min > 0.0 { 1 } else { -1 },
            nodes: nodes.len(),
            resolution: n,
            tol: opts.tol,
        },
    })
}

fn check_periodicity(alpha: &DifferentialForm, domain: &Domain) -> Result<(), ContactError> {
    let coeffs: Vec<_> = alpha.coefficients().iter().map(Expr::compile).collect();
    for axis in [1, 2] {
        let Some(period) = domain.periodic(axis) else { continue };
        for i in 0..5 {
            for j in 0..5 {
                let mut p = [0.0; 3];
                let (a, b) = if axis == 1 { (0, 2) } else { (0, 1) };
                p[a] = domain.lo[a] + (domain.hi[a] - domain.lo[a]) * (i as f64 + 0.37) / 5.0;
                p[b] = domain.lo[b] + (domain.hi[b] - domain.lo[b]) * (j as f64 + 0.61) / 5.0;
                p[axis] = domain.lo[axis] + 0.29 * period;
                let mut q = p;
                q[axis] += period;
                for c in &coeffs {
                    let x = c.try_eval(&point_xyz(p[0], p[1], p[2]))?;
                    let y = c.try_eval(&point_xyz(q[0], q[1], q[2]))?;
                    if (x - y).abs() > 1e-9 * (1.0 + x.abs()) {
                        return Err(ContactError::NotPeriodic { axis, point: p });
                    }
                }
            }
        }
    }
    Ok(())
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: [f64; 3]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Orthonormal basis `(e1, e2)` of `ker alpha_p` with `det(e1, e2, A) > 0`,
/// where `A` is the covector of alpha at `p` read as a vector.
pub fn kernel_basis(alpha: &ContactForm, p: [f64; 3]) -> Result<[[f64; 3]; 2], ContactError> {
    let a = alpha.covector(p)?;
    let len = norm(a);
    if len < 1e-300 || !len.is_finite() {
        return Err(ContactError::DegenerateKernel(p));
    }
    let a = [a[0] / len, a[1] / len, a[2] / len];
    let axis = (0..3)
        .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap_or(0);
    let mut m = [0.0; 3];
    m[axis] = 1.0;
    let t = cross(a, m);
    let tl = norm(t);
    let e1 = [t[0] / tl, t[1] / tl, t[2] / tl];
    let e2 = cross(a, e1);
    Ok([e1, e2])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LieCheck {
    pub is_contact_field: bool,
    pub residual: f64,
    pub resolution: usize,
    pub tol: f64,
}

/// `L_v alpha = i_v d alpha + d(alpha(v))`.
pub fn lie_derivative(alpha: &DifferentialForm, v: &[Expr; 3]) -> Result<DifferentialForm, FormError> {
    let a = alpha.exterior_derivative()?.interior(v)?;
    let av = alpha.interior(v)?;
    a.add(&av.exterior_derivative()?)
}

/// Tests whether the flow of `v` preserves `ker alpha` by sampling
/// `(L_v alpha) ^ alpha` on the domain grid.
pub fn lie_derivative_check(
    alpha: &ContactForm,
    v: &[Expr; 3],
    opts: GridOptions,
) -> Result<LieCheck, ContactError> {
    let l = lie_derivative(alpha.alpha(), v)?;
    let w = l.wedge(alpha.alpha())?;
    let coeffs: Vec<_> = w.coefficients().iter().map(Expr::compile).collect();
    let nodes = alpha.domain().grid_points(opts.resolution.max(2));
    let residuals: Vec<Result<f64, EvalError>> = nodes
        .par_iter()
        .map(|(_, p)| {
            let mut r: f64 = 0.0;
            for c in &coeffs {
                r = r.max(c.try_eval(p)?.abs());
            }
            Ok(r)
        })
        .collect();
    let mut residual: f64 = 0.0;
    for r in residuals {
        residual = residual.max(r?);
    }
    Ok(LieCheck {
        is_contact_field: residual <= opts.tol,
        residual,
        resolution: opts.resolution,
        tol: opts.tol,
    })
}

/// Contact vector field of `h` for `dz + x dy`: the unique `v` with
/// `alpha(v) = h` and `L_v alpha = h_z alpha`.
pub fn contact_hamiltonian_field(h: &Expr) -> [Expr; 3] {
    let x = Expr::var(Var::X);
    let hx = h.diff(Var::X);
    let hy = h.diff(Var::Y);
    let hz = h.diff(Var::Z);
    [
        Expr::sub(Expr::mul(x.clone(), hz), hy),
        hx.clone(),
        Expr::sub(h.clone(), Expr::mul(x, hx)),
    ]
}

/// `dz + x dy`.
pub fn standard_alpha() -> DifferentialForm {
    DifferentialForm::one_form(Expr::zero(), Expr::var(Var::X), Expr::one())
}

/// `dz + x dy - y dx`.
pub fn rotational_alpha() -> DifferentialForm {
    DifferentialForm::one_form(Expr::neg(Expr::var(Var::Y)), Expr::var(Var::X), Expr::one())
}

/// `cos(r) dz + sinc(r) (x dy - y dx)` with `r = sqrt(x^2 + y^2)`.
pub fn overtwisted_alpha() -> DifferentialForm {
    let r = Expr::sqrt(Expr::add(Expr::pow(Expr::var(Var::X), 2), Expr::pow(Expr::var(Var::Y), 2)));
    let s = Expr::sinc(r.clone());
    DifferentialForm::one_form(
        Expr::neg(Expr::mul(s.clone(), Expr::var(Var::Y))),
        Expr::mul(s, Expr::var(Var::X)),
        Expr::cos(r),
    )
}
