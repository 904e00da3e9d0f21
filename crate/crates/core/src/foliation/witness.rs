use serde::Serialize;

use crate::contact::ContactForm;

use super::leaves::{default_seeds, detect_closed_leaves, ClosedLeaf};
use super::pullback::pullback;
use super::surface::{cross, dot, norm, Surface, Topology};
use super::{FoliationError, FoliationOptions};

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessEvidence {
    /// `ker alpha` equals the tangent plane along the whole boundary.
    SingularBoundary { max_angle: f64, samples: usize },
    /// The boundary is tangent to `ker alpha` without singular points.
    ClosedBoundaryLeaf {
        max_tangency: f64,
        min_angle: f64,
        leaf: Option<ClosedLeaf>,
    },
    InteriorClosedLeaf { leaf: ClosedLeaf },
    None {
        boundary_max_tangency: f64,
        boundary_max_angle: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessReport {
    pub found: bool,
    pub evidence: WitnessEvidence,
    pub options: FoliationOptions,
}

struct BoundarySample {
    chart: [f64; 2],
    /// Angle between `ker alpha` and the tangent plane.
    angle: f64,
    /// `|alpha(t)| / (|alpha| |t|)` for the boundary tangent `t`.
    tangency: f64,
}

fn boundary_samples(alpha: &ContactForm, surface: &Surface, per_edge: usize) -> Vec<BoundarySample> {
    let mut out = Vec::new();
    for axis in 0..2 {
        if surface.periodic()[axis] {
            continue;
        }
        for at in [0.0, 1.0] {
            if surface.collapsed_edges().iter().any(|e| e.axis == axis && e.at == at) {
                continue;
            }
            for k in 0..per_edge {
                let t = (k as f64 + 0.5) / per_edge as f64;
                let q = if axis == 0 { [at, t] } else { [t, at] };
                let [su, sv] = surface.partials(q[0], q[1]);
                let tangent = if axis == 0 { sv } else { su };
                let p = surface.point(q[0], q[1]);
                let Ok(a) = alpha.covector(p) else { continue };
                let nu = cross(su, sv);
                let (al, nl, tl) = (norm(a), norm(nu), norm(tangent));
                out.push(BoundarySample {
                    chart: q,
                    angle: (norm(cross(a, nu)) / (al * nl)).min(1.0).asin(),
                    tangency: dot(a, tangent).abs() / (al * tl),
                });
            }
        }
    }
    out
}

/// Searches a disk for an overtwisted pattern: an entirely singular
/// boundary, a boundary that is a closed leaf, or an interior closed leaf.
pub fn overtwisted_witness(
    alpha: &ContactForm,
    surface: &Surface,
    opts: &FoliationOptions,
) -> Result<WitnessReport, FoliationError> {
    if surface.topology() != Topology::Disk {
        return Err(FoliationError::WrongTopology {
            expected: Topology::Disk,
            found: surface.topology(),
        });
    }
    opts.validate()?;
    let pb = pullback(alpha, surface)?;
    let samples = boundary_samples(alpha, surface, 256);
    let max_angle = samples.iter().map(|s| s.angle).fold(0.0, f64::max);
    let min_angle = samples.iter().map(|s| s.angle).fold(f64::INFINITY, f64::min);
    let max_tangency = samples.iter().map(|s| s.tangency).fold(0.0, f64::max);

    let evidence = if !samples.is_empty() && max_angle <= opts.tangency_tol {
        WitnessEvidence::SingularBoundary {
            max_angle,
            samples: samples.len(),
        }
    } else if !samples.is_empty() && max_tangency <= opts.tangency_tol && min_angle > opts.tangency_tol {
        let seed = samples[0].chart;
        let leaf = detect_closed_leaves(&pb, surface, &[seed], opts).into_iter().next();
        WitnessEvidence::ClosedBoundaryLeaf {
            max_tangency,
            min_angle,
            leaf,
        }
    } else {
        match detect_closed_leaves(&pb, surface, &default_seeds(surface, opts), opts)
            .into_iter()
            .next()
        {
            Some(leaf) => WitnessEvidence::InteriorClosedLeaf { leaf },
            None => WitnessEvidence::None {
                boundary_max_tangency: max_tangency,
                boundary_max_angle: max_angle,
            },
        }
    };
    Ok(WitnessReport {
        found: !matches!(evidence, WitnessEvidence::None { .. }),
        evidence,
        options: *opts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{overtwisted_alpha, standard_alpha, Domain};
    use crate::foliation::surface::examples::*;

    fn xi3() -> ContactForm {
        ContactForm::assume(overtwisted_alpha(), Domain::cube(-4.0, 4.0)).unwrap()
    }

    #[test]
    fn flat_disk_boundary_is_singular() {
        let r = overtwisted_witness(&xi3(), &flat_disk(), &FoliationOptions::default()).unwrap();
        assert!(r.found);
        assert!(matches!(r.evidence, WitnessEvidence::SingularBoundary { .. }), "{:?}", r.evidence);
    }

    #[test]
    fn pushed_disk_boundary_is_a_closed_leaf() {
        let r = overtwisted_witness(&xi3(), &pushed_disk(0.5), &FoliationOptions::default()).unwrap();
        assert!(r.found);
        let WitnessEvidence::ClosedBoundaryLeaf { leaf, .. } = &r.evidence else {
            panic!("{:?}", r.evidence)
        };
        let leaf = leaf.as_ref().expect("boundary leaf closes up");
        assert!(leaf.recurrence < 1e-6);
        assert!((leaf.period - 1.0).abs() < 1e-6);
    }

    #[test]
    fn paraboloid_disk_has_no_witness() {
        let c = ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let r = overtwisted_witness(&c, &paraboloid_disk(0.1), &FoliationOptions::default()).unwrap();
        assert!(!r.found, "{:?}", r.evidence);
    }
}
