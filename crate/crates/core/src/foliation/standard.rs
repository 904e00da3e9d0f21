use serde::Serialize;

use super::leaves::{default_seeds, detect_closed_leaves, ClosedLeaf};
use super::pullback::PulledBackForm;
use super::singular::find_singularities;
use super::surface::{Surface, Topology};
use super::{FoliationError, FoliationOptions};

/// Direction `(run, rise)` in chart homology coordinates, reduced, with
/// `run >= 0` (and `rise = 1` when `run = 0`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Slope {
    pub rise: i64,
    pub run: i64,
}

impl Slope {
    fn from_direction(d: [f64; 2], tol: f64) -> Option<Slope> {
        let (mut run, mut rise) = (d[0], d[1]);
        if run < 0.0 || (run == 0.0 && rise < 0.0) {
            run = -run;
            rise = -rise;
        }
        if run.abs() <= tol * rise.abs() {
            return Some(Slope { rise: 1, run: 0 });
        }
        let (p, q) = rational(rise / run, 64, tol)?;
        Some(Slope { rise: p, run: q })
    }
}

/// Best rational approximation with denominator at most `max_den`, if it
/// is within `tol`.
fn rational(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..32 {
        let a = r.floor();
        if a.abs() > 1e12 {
            break;
        }
        let a = a as i64;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    ((x - h1 as f64 / k1 as f64).abs() <= tol && k1 > 0).then_some((h1, k1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Divide {
    pub chart_points: Vec<[f64; 2]>,
    pub slope: Option<Slope>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StandardForm {
    pub legendrian_divides: Vec<Divide>,
    /// Common slope of the nonsingular leaves, when they are parallel lines.
    pub ruling_slope: Option<Slope>,
    pub rulings_parallel: bool,
    pub is_standard_form: bool,
    pub reason: Option<String>,
    pub closed_leaves: Vec<ClosedLeaf>,
}

/// Looks for circles of singularities and parallel linear leaves on a torus.
pub fn standard_form_check(
    surface: &Surface,
    pb: &PulledBackForm,
    opts: &FoliationOptions,
) -> Result<StandardForm, FoliationError> {
    if surface.topology() != Topology::Torus {
        return Err(FoliationError::WrongTopology {
            expected: Topology::Torus,
            found: surface.topology(),
        });
    }
    let set = find_singularities(pb, surface, opts)?;
    let n = opts.grid;
    let mut divides = Vec::new();
    for locus in &set.degenerate_loci {
        if let Some(slope) = circle_slope(surface, &locus.chart_points, n) {
            divides.push(Divide {
                chart_points: locus.chart_points.clone(),
                slope,
            });
        }
    }

    // leaf directions away from the singular set
    let singular_near = |q: [f64; 2]| {
        set.degenerate_loci
            .iter()
            .flat_map(|l| l.chart_points.iter())
            .chain(set.singularities.iter().map(|s| &s.chart))
            .any(|p| surface.chart_distance(*p, q) < 2.0 / n as f64)
    };
    let mut scale: f64 = 0.0;
    let mut dirs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let q = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
            let w = pb.w_at(q);
            let m = w[0].hypot(w[1]);
            scale = scale.max(m);
            if !singular_near(q) {
                dirs.push((w, m));
            }
        }
    }
    let mut reference: Option<[f64; 2]> = None;
    let mut parallel = true;
    for (w, m) in dirs {
        if m <= 1e-6 * scale {
            continue;
        }
        let d = [w[0] / m, w[1] / m];
        match reference {
            None => reference = Some(d),
            Some(r) => {
                if (r[0] * d[1] - r[1] * d[0]).abs() > 1e-6 {
                    parallel = false;
                    break;
                }
            }
        }
    }
    let ruling_slope = if parallel { reference.and_then(|d| Slope::from_direction(d, 1e-6)) } else { None };
    let closed_leaves = detect_closed_leaves(pb, surface, &default_seeds(surface, opts), opts);

    let reason = if !parallel {
        Some("nonsingular leaves are not parallel lines".to_string())
    } else if divides.is_empty() {
        Some("no Legendrian divides".to_string())
    } else if ruling_slope.is_none() {
        Some("ruling slope is not a rational direction".to_string())
    } else if divides.iter().any(|d| d.slope.is_none() || d.slope == ruling_slope) {
        Some("divides are not transverse to the ruling".to_string())
    } else if divides.len() % 2 != 0 {
        Some("odd number of divides".to_string())
    } else {
        None
    };
    Ok(StandardForm {
        is_standard_form: reason.is_none(),
        legendrian_divides: divides,
        ruling_slope,
        rulings_parallel: parallel,
        reason,
        closed_leaves,
    })
}

/// Slope of a locus that closes up around the torus, or `None` if the
/// locus does not cover a full period.
fn circle_slope(surface: &Surface, pts: &[[f64; 2]], n: usize) -> Option<Option<Slope>> {
    let covers = |axis: usize| {
        if !surface.periodic()[axis] || pts.is_empty() {
            return false;
        }
        let mut c: Vec<f64> = pts.iter().map(|p| p[axis].rem_euclid(1.0)).collect();
        c.sort_by(f64::total_cmp);
        let mut gap = 1.0 - c[c.len() - 1] + c[0];
        for w in c.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap < 3.0 / n as f64
    };
    let axis = (0..2).find(|&a| covers(a))?;
    // unwrap the other coordinate by continuity along the covered axis
    let mut sorted: Vec<[f64; 2]> = pts.to_vec();
    sorted.sort_by(|a, b| a[axis].total_cmp(&b[axis]));
    let other = 1 - axis;
    let mut unwrapped = Vec::with_capacity(sorted.len());
    let mut prev: Option<[f64; 2]> = None;
    for p in sorted {
        let q = match prev {
            None => p,
            Some(r) => {
                let d = surface.chart_delta(r, p);
                let mut q = p;
                q[other] = r[other] + d[other];
                q
            }
        };
        unwrapped.push(q);
        prev = Some(q);
    }
    let m = unwrapped.len() as f64;
    let mean = [0, 1].map(|i| unwrapped.iter().map(|p| p[i]).sum::<f64>() / m);
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for p in &unwrapped {
        let dx = p[axis] - mean[axis];
        sxx += dx * dx;
        sxy += dx * (p[other] - mean[other]);
    }
    let k = sxy / sxx;
    let mut d = [0.0; 2];
    d[axis] = 1.0;
    d[other] = k;
    Some(Slope::from_direction(d, 2.0 / n as f64))
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
    fn rationals() {
        assert_eq!(rational(0.0, 64, 1e-9), Some((0, 1)));
        assert_eq!(rational(-0.75, 64, 1e-9), Some((-3, 4)));
        assert_eq!(rational(std::f64::consts::PI, 64, 1e-9), None);
    }

    #[test]
    fn sine_form_is_standard() {
        let s = torus_sine();
        let pb = PulledBackForm::from_beta("sin(2*pi*v)".parse().unwrap(), Expr::zero());
        let r = standard_form_check(&s, &pb, &opts()).unwrap();
        assert_eq!(r.legendrian_divides.len(), 2);
        for d in &r.legendrian_divides {
            assert_eq!(d.slope, Some(Slope { rise: 0, run: 1 }));
            let v = d.chart_points[0][1];
            assert!(v.min(1.0 - v) < 1e-9 || (v - 0.5).abs() < 1e-9);
        }
        assert_eq!(r.ruling_slope, Some(Slope { rise: 1, run: 0 }));
        assert!(r.is_standard_form, "{:?}", r.reason);
    }

    #[test]
    fn constant_form_has_no_divides() {
        let s = torus_sine();
        let pb = PulledBackForm::from_beta(Expr::zero(), Expr::one());
        let r = standard_form_check(&s, &pb, &opts()).unwrap();
        assert!(r.legendrian_divides.is_empty());
        assert_eq!(r.ruling_slope, Some(Slope { rise: 0, run: 1 }));
        assert!(!r.is_standard_form);
    }

    #[test]
    fn sine_torus_is_not_linear() {
        let c = ContactForm::assume(standard_alpha(), Domain::quotient(-2.0, 2.0, 1.0, 1.0)).unwrap();
        let s = torus_sine();
        let r = standard_form_check(&s, &pullback(&c, &s).unwrap(), &opts()).unwrap();
        assert!(!r.rulings_parallel && !r.is_standard_form);
        assert_eq!(r.closed_leaves.len(), 2);
    }

    #[test]
    fn requires_a_torus() {
        let s = sphere();
        let pb = PulledBackForm::from_beta(Expr::zero(), Expr::one());
        assert!(matches!(
            standard_form_check(&s, &pb, &opts()),
            Err(FoliationError::WrongTopology { .. })
        ));
    }
}
