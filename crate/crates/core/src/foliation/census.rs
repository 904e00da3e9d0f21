use serde::Serialize;

use crate::contact::ContactForm;

use super::leaves::{default_seeds, detect_closed_leaves, integrate_leaf, ClosedLeaf, Leaf};
use super::pullback::pullback;
use super::singular::{find_singularities, DegenerateLocus, SingularSet, Singularity, SingularityKind, SingularitySign};
use super::surface::{Surface, Topology};
use super::{FoliationError, FoliationOptions};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Census {
    pub e_plus: i32,
    pub e_minus: i32,
    pub h_plus: i32,
    pub h_minus: i32,
}

impl Census {
    /// `(e+ + e-) - (h+ + h-)`.
    pub fn chi(&self) -> i32 {
        (self.e_plus + self.e_minus) - (self.h_plus + self.h_minus)
    }

    /// `(e+ - h+) - (e- - h-)`.
    pub fn euler_class(&self) -> i32 {
        (self.e_plus - self.h_plus) - (self.e_minus - self.h_minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Ok,
    Degenerate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoliationReport {
    pub status: ReportStatus,
    pub topology: Topology,
    pub census: Census,
    pub singularities: Vec<Singularity>,
    pub degenerate_loci: Vec<DegenerateLocus>,
    pub closed_leaves: Vec<ClosedLeaf>,
    pub sampled_leaves: Vec<Leaf>,
    /// Absent when the status is degenerate.
    pub chi_computed: Option<i32>,
    pub euler_class_computed: Option<i32>,
    pub declared_chi: i32,
    /// Whether the computed and declared Euler characteristics agree; absent
    /// for surfaces with boundary or degenerate reports.
    pub consistent: Option<bool>,
    pub newton_failures: usize,
    pub orientation_flipped: bool,
    pub options: FoliationOptions,
}

/// Counts signed elliptic and hyperbolic points. Degenerate points or loci
/// mark the report degenerate and leave the counts unset.
pub fn census_and_counts(set: &SingularSet, topology: Topology, opts: &FoliationOptions) -> FoliationReport {
    let mut census = Census::default();
    let mut degenerate = !set.degenerate_loci.is_empty();
    for s in &set.singularities {
        match (s.kind, s.sign) {
            (SingularityKind::Degenerate, _) | (_, SingularitySign::Undetermined) => degenerate = true,
            (SingularityKind::Elliptic, SingularitySign::Positive) => census.e_plus += 1,
            (SingularityKind::Elliptic, SingularitySign::Negative) => census.e_minus += 1,
            (SingularityKind::Hyperbolic, SingularitySign::Positive) => census.h_plus += 1,
            (SingularityKind::Hyperbolic, SingularitySign::Negative) => census.h_minus += 1,
        }
    }
    let declared_chi = topology.euler_characteristic();
    let (status, chi, e) = if degenerate {
        (ReportStatus::Degenerate, None, None)
    } else {
        (ReportStatus::Ok, Some(census.chi()), Some(census.euler_class()))
    };
    FoliationReport {
        status,
        topology,
        census,
        singularities: set.singularities.clone(),
        degenerate_loci: set.degenerate_loci.clone(),
        closed_leaves: Vec::new(),
        sampled_leaves: Vec::new(),
        chi_computed: chi,
        euler_class_computed: e,
        declared_chi,
        consistent: chi.filter(|_| topology.is_closed()).map(|c| c == declared_chi),
        newton_failures: set.newton_failures,
        orientation_flipped: false,
        options: *opts,
    }
}

/// Pullback, singularities, closed leaves and a few sample leaves.
pub fn foliate(alpha: &ContactForm, surface: &Surface, opts: &FoliationOptions) -> Result<FoliationReport, FoliationError> {
    opts.validate()?;
    let pb = pullback(alpha, surface)?;
    let set = find_singularities(&pb, surface, opts)?;
    let mut report = census_and_counts(&set, surface.topology(), opts);
    report.orientation_flipped = pb.flipped();
    report.closed_leaves = detect_closed_leaves(&pb, surface, &default_seeds(surface, opts), opts);
    let sample_opts = FoliationOptions {
        seeds: 6,
        max_length: opts.max_length.min(4.0),
        ..*opts
    };
    for seed in default_seeds(surface, &sample_opts) {
        for dir in [1, -1] {
            if let Ok(mut leaf) = integrate_leaf(&pb, surface, seed, dir, &sample_opts) {
                leaf.points = thin(&leaf.points, 5);
                report.sampled_leaves.push(leaf);
            }
        }
    }
    Ok(report)
}

pub(crate) fn thin(points: &[[f64; 2]], every: usize) -> Vec<[f64; 2]> {
    let mut out: Vec<[f64; 2]> = points.iter().step_by(every.max(1)).copied().collect();
    if let (Some(last), Some(kept)) = (points.last(), out.last()) {
        if last != kept {
            out.push(*last);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GenusBound {
    pub lhs: i32,
    pub rhs: i32,
    pub satisfied: bool,
    /// A violation certifies that the contact structure is not tight.
    pub overtwisted_witness: bool,
}

/// `|e| <= -chi` for closed surfaces, with right-hand side 0 on the sphere.
pub fn check_genus_bound(report: &FoliationReport) -> Result<GenusBound, FoliationError> {
    if !report.topology.is_closed() {
        return Err(FoliationError::OpenSurface(report.topology));
    }
    let e = report.euler_class_computed.ok_or(FoliationError::Degenerate)?;
    let rhs = match report.topology {
        Topology::Sphere => 0,
        t => -t.euler_characteristic(),
    };
    let lhs = e.abs();
    Ok(GenusBound {
        lhs,
        rhs,
        satisfied: lhs <= rhs,
        overtwisted_witness: lhs > rhs,
    })
}
