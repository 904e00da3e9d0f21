mod common;

use common::*;
use contact_core::contact::{contact_hamiltonian_field, lie_derivative_check, standard_alpha, ContactForm, Domain, GridOptions};
use contact_core::expr::{point_xyz, Var};
use contact_core::forms::DifferentialForm;
use proptest::prelude::*;
use rand::Rng;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(cases)
    }
}

/// Sum of absolute second partials of the coefficients, a scale for the
/// cancellation error in `d d`.
fn second_partial_scale(f: &DifferentialForm, p: [f64; 3]) -> f64 {
    let q = point_xyz(p[0], p[1], p[2]);
    let mut s = 0.0;
    for c in f.coefficients() {
        for a in Var::SPACE {
            for b in Var::SPACE {
                s += c.diff(a).diff(b).eval(&q).abs();
            }
        }
    }
    s
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let degree = r.gen_range(0..2);
        let f = random_form(&mut r, degree, 4);
        let dd = f.exterior_derivative().unwrap().exterior_derivative().unwrap();
        prop_assert_eq!(dd.degree(), degree + 2);
        for _ in 0..5 {
            let p = random_point(&mut r);
            let scale = second_partial_scale(&f, p);
            for v in dd.eval(&point_xyz(p[0], p[1], p[2])).unwrap() {
                prop_assert!(v.abs() <= 1e-12 * (1.0 + scale), "{} at {:?}: {}", f, p, v);
            }
        }
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = r.gen_range(0..3);
        let q = r.gen_range(0..=3 - p);
        let a = random_form(&mut r, p, 3);
        let b = random_form(&mut r, q, 3);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let expected = if p * q % 2 == 1 { ba.neg() } else { ba };
        prop_assert_eq!(ab.degree(), p + q);
        prop_assert!(ab.approx_eq(&expected, 20, 1e-9));
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn derivatives_match_central_differences(seed in any::<u64>()) {
        let mut r = rng(seed);
        let e = random_expr(&mut r, 5);
        let h = 1e-5;
        for _ in 0..100 {
            let p = random_point(&mut r);
            for (k, v) in Var::SPACE.into_iter().enumerate() {
                let mut hi = p;
                let mut lo = p;
                hi[k] += h;
                lo[k] -= h;
                let fd = (e.eval(&point_xyz(hi[0], hi[1], hi[2])) - e.eval(&point_xyz(lo[0], lo[1], lo[2]))) / (2.0 * h);
                let exact = e.diff(v).eval(&point_xyz(p[0], p[1], p[2]));
                prop_assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                    "d/d{} of {} at {:?}: {} vs {}", v.name(), e, p, exact, fd
                );
            }
        }
    }

    #[test]
    fn hamiltonian_fields_are_contact(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = random_expr(&mut r, 3);
        let v = contact_hamiltonian_field(&h);
        let alpha = ContactForm::assume(standard_alpha(), Domain::cube(-1.0, 1.0)).unwrap();
        let check = lie_derivative_check(&alpha, &v, GridOptions { resolution: 6, tol: 1e-9 }).unwrap();
        prop_assert!(check.is_contact_field, "{}: residual {}", h, check.residual);
        let x = point_xyz(0.3, -0.2, 0.7);
        let contracted = standard_alpha().interior(&v).unwrap().coefficients()[0].eval(&x);
        prop_assert!((contracted - h.eval(&x)).abs() < 1e-9 * (1.0 + h.eval(&x).abs()));
    }
}
