mod common;

use common::*;
use contact_core::contact::ContactForm;
use contact_core::foliation::surface::examples::{sphere, sphere_x_poles, torus_sine};
use contact_core::foliation::{
    census_and_counts, dividing_set, find_singularities, pullback, FlowType, FoliationOptions, FoliationReport,
    ReportStatus, SingularityKind, SingularitySign, Surface,
};
use contact_core::expr::Expr;
use contact_core::fronts::hausdorff;

fn opts() -> FoliationOptions {
    FoliationOptions::default()
}

/// The singularity census of a foliation run, without leaf tracing.
fn census(alpha: &ContactForm, s: &Surface, opts: &FoliationOptions) -> FoliationReport {
    let set = find_singularities(&pullback(alpha, s).unwrap(), s, opts).unwrap();
    census_and_counts(&set, s.topology(), opts)
}

fn perturbed_family() -> Vec<(ContactForm, Surface)> {
    let mut r = rng(7);
    let mut out = Vec::new();
    for _ in 0..25 {
        out.push((xi2(), perturbed_sphere(&mut r, 0.05)));
        out.push((xi1_quotient(), perturbed_torus(&mut r, 0.05)));
    }
    out
}

#[test]
fn poincare_hopf_on_perturbed_surfaces() {
    for (alpha, s) in perturbed_family() {
        let rep = census(&alpha, &s, &opts());
        assert_eq!(rep.status, ReportStatus::Ok, "{:?}", s.to_spec());
        assert_eq!(rep.chi_computed, Some(s.topology().euler_characteristic()), "{:?}", s.to_spec());
        assert_eq!(rep.consistent, Some(true));
    }
}

#[test]
fn elliptic_points_follow_the_orientation_law() {
    for (alpha, s) in perturbed_family() {
        let set = find_singularities(&pullback(&alpha, &s).unwrap(), &s, &opts()).unwrap();
        for p in set.singularities.iter().filter(|p| p.kind == SingularityKind::Elliptic) {
            let expected = match p.sign {
                SingularitySign::Positive => FlowType::Source,
                SingularitySign::Negative => FlowType::Sink,
                SingularitySign::Undetermined => panic!("elliptic point without a sign: {p:?}"),
            };
            assert_eq!(p.flow, Some(expected), "{p:?}");
        }
    }
}

fn scaled(alpha: &ContactForm, c: f64) -> ContactForm {
    ContactForm::assume(alpha.alpha().scale(&Expr::num(c)), alpha.domain().clone()).unwrap()
}

#[test]
fn reversing_the_form_swaps_signs_and_keeps_kinds() {
    for s in [sphere(), sphere_x_poles()] {
        let a = find_singularities(&pullback(&xi2(), &s).unwrap(), &s, &opts()).unwrap();
        let b = find_singularities(&pullback(&scaled(&xi2(), -1.0), &s).unwrap(), &s, &opts()).unwrap();
        assert_eq!(a.singularities.len(), b.singularities.len());
        for (p, q) in a.singularities.iter().zip(&b.singularities) {
            assert!((p.point[2] - q.point[2]).abs() < 1e-9);
            assert_eq!(p.kind, q.kind);
            assert_eq!(p.sign, q.sign.flip());
            assert_ne!(p.flow, q.flow);
        }
    }
}

#[test]
fn dividing_set_is_scale_robust() {
    let s = torus_sine();
    let a = dividing_set(&pullback(&xi1_quotient(), &s).unwrap(), &s, &opts()).unwrap();
    let b = dividing_set(&pullback(&scaled(&xi1_quotient(), 2.0), &s).unwrap(), &s, &opts()).unwrap();
    assert_eq!(a.status, b.status);
    assert_eq!(a.gamma.len(), b.gamma.len());
    let lift = |pts: &[[f64; 2]]| pts.iter().map(|p| [p[0], p[1], 0.0]).collect::<Vec<_>>();
    for (g, h) in a.gamma.iter().zip(&b.gamma) {
        assert!(hausdorff(&lift(&g.points), &lift(&h.points)) < 1e-6);
    }
}

#[test]
fn euler_class_is_stable_under_refinement() {
    let cases = [(xi2(), sphere()), (xi2(), sphere_x_poles()), (xi1_quotient(), torus_sine())];
    for (alpha, s) in cases {
        let e: Vec<Option<i32>> = [32, 64, 128]
            .into_iter()
            .map(|grid| {
                let o = FoliationOptions { grid, ..opts() };
                census(&alpha, &s, &o).euler_class_computed
            })
            .collect();
        assert!(e[0].is_some());
        assert!(e.iter().all(|x| *x == e[0]), "{e:?}");
    }
}
