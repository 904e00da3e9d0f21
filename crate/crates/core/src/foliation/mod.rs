//! Characteristic foliations of parametrized surfaces.
//!
//! The foliation is represented in chart coordinates by the directing field
//! `W = (beta2, -beta1)` of the pulled-back form `beta`. Singularities are
//! found by bracketing and Newton iteration; points where the chart itself
//! degenerates (poles, polar centers) are classified by a small loop in the
//! surface instead.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contact::ContactError;
use crate::expr::ParseError;

mod census;
mod dividing;
mod leaves;
mod pullback;
mod singular;
mod standard;
pub mod surface;
pub mod svg;
mod witness;

pub use census::{census_and_counts, check_genus_bound, foliate, Census, FoliationReport, GenusBound, ReportStatus};
pub use dividing::{dividing_set, Certificate, DividingSetReport, DividingStatus, GammaCurve};
pub use leaves::{detect_closed_leaves, default_seeds, integrate_leaf, ClosedLeaf, Leaf, LeafEnd};
pub use pullback::{pullback, PulledBackForm};
pub use singular::{
    find_singularities, DegenerateLocus, Eigen, FlowType, SingularSet, Singularity, SingularityKind, SingularitySign,
};
pub use standard::{standard_form_check, Slope, StandardForm};
pub use surface::{Surface, SurfaceSpec, Topology};
pub use witness::{overtwisted_witness, WitnessEvidence, WitnessReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FoliationError {
    #[error("invalid surface: {0}")]
    Surface(String),
    #[error("cannot parse {field}: {source}")]
    Parse { field: String, source: ParseError },
    #[error("chart is not immersed near {chart:?} and no degenerate point is declared there")]
    NotImmersed { chart: [f64; 2] },
    #[error("periodic edges of axis {axis} disagree at parameter {at}")]
    Periodicity { axis: usize, at: f64 },
    #[error("grid resolution {0} is below the minimum of {1}")]
    Resolution(usize, usize),
    #[error("seed {0:?} is at a singularity")]
    ImmediateSingularity([f64; 2]),
    #[error("integration step {0} is not a usable step size")]
    StepUnderflow(f64),
    #[error("report has degenerate singularities; counts are unavailable")]
    Degenerate,
    #[error("operation requires a closed surface, got {0:?}")]
    OpenSurface(Topology),
    #[error("operation requires topology {expected:?}, got {found:?}")]
    WrongTopology { expected: Topology, found: Topology },
    #[error("invalid option: {0}")]
    Options(String),
    #[error(transparent)]
    Contact(#[from] ContactError),
}

/// Numerical settings shared by the foliation operations. Reports embed the
/// values they were computed with.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoliationOptions {
    /// Cells per chart axis for singularity scans and contours.
    pub grid: usize,
    /// Newton stops when `|W| < newton_tol`.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// Threshold on `det DW` and `trace DW` separating kinds.
    pub kind_tol: f64,
    /// Threshold on `|alpha(nu)| / (|alpha| |nu|)` for a definite sign.
    pub sign_tol: f64,
    /// Threshold on the angle between `ker alpha` and the tangent plane for
    /// tangency at chart-degenerate points.
    pub tangency_tol: f64,
    /// Chart radius of the loop around chart-degenerate points.
    pub loop_radius: f64,
    pub loop_samples: usize,
    /// RK4 step in chart units.
    pub step: f64,
    /// Maximal chart arc length of a traced leaf.
    pub max_length: f64,
    /// Leaves stop where `|W|` drops below this.
    pub singular_tol: f64,
    /// Return-map recurrence tolerance for closed leaves.
    pub recurrence_tol: f64,
    /// Seed lattice is `seeds x seeds`.
    pub seeds: usize,
    pub max_returns: usize,
    /// Bisection tolerance on dividing-curve vertices.
    pub contour_tol: f64,
    /// Minimal angle between `W` and the dividing set, in radians.
    pub transversality_tol: f64,
    /// Minimal `|div W|` on region samples.
    pub divergence_tol: f64,
}

impl Default for FoliationOptions {
    fn default() -> Self {
        FoliationOptions {
            grid: 64,
            newton_tol: 1e-10,
            newton_max_iter: 60,
            kind_tol: 1e-8,
            sign_tol: 1e-6,
            tangency_tol: 1e-6,
            loop_radius: 1e-3,
            loop_samples: 64,
            step: 2e-3,
            max_length: 12.0,
            singular_tol: 1e-8,
            recurrence_tol: 1e-6,
            seeds: 16,
            max_returns: 60,
            contour_tol: 1e-8,
            transversality_tol: 1e-3,
            divergence_tol: 1e-6,
        }
    }
}

impl FoliationOptions {
    pub fn validate(&self) -> Result<(), FoliationError> {
        if self.grid < 32 {
            return Err(FoliationError::Resolution(self.grid, 32));
        }
        if !(self.step > 1e-9 && self.step <= 0.1) {
            return Err(FoliationError::StepUnderflow(self.step));
        }
        let positive = [
            ("newton_tol", self.newton_tol),
            ("kind_tol", self.kind_tol),
            ("sign_tol", self.sign_tol),
            ("tangency_tol", self.tangency_tol),
            ("loop_radius", self.loop_radius),
            ("max_length", self.max_length),
            ("singular_tol", self.singular_tol),
            ("recurrence_tol", self.recurrence_tol),
            ("contour_tol", self.contour_tol),
            ("transversality_tol", self.transversality_tol),
            ("divergence_tol", self.divergence_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(FoliationError::Options(format!("{name} must be positive")));
            }
        }
        if self.loop_radius >= 0.1 || self.loop_samples < 8 || self.seeds == 0 {
            return Err(FoliationError::Options("loop or seed settings out of range".into()));
        }
        Ok(())
    }
}
