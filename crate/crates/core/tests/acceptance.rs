//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;

use common::*;
use contact_core::contact::{
    check_contact, overtwisted_alpha, rotational_alpha, standard_alpha, ContactError, ContactForm, Domain,
    GridOptions,
};
use contact_core::expr::{point_xyz, Var};
use contact_core::foliation::surface::examples::{flat_disk, pushed_disk, sphere, sphere_x_poles, torus_sine};
use contact_core::foliation::{
    census_and_counts, check_genus_bound, dividing_set, find_singularities, foliate, overtwisted_witness, pullback,
    DividingStatus, FlowType, FoliationOptions, ReportStatus, SingularityKind, SingularitySign, WitnessEvidence,
};
use contact_core::forms::DifferentialForm;
use contact_core::expr::Expr;
use contact_core::fronts::{
    apply_move, examples, invariants, legendrian_approximate, orient, parse_front, stabilize, underlying_diagram,
    ApproxOptions, FrontWord, StabilizationSign,
};
use contact_core::seifert::{bennequin_check, knot_proxies, seifert_surface};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn contact_suite() -> Outcome {
    let grid = GridOptions::default();
    let cube = Domain::cube(-2.0, 2.0);

    let a1 = check_contact(&standard_alpha(), &cube, grid).map_err(|e| format!("alpha1 rejected: {e}"))?;
    let s = a1.summary();
    ensure(s.min == 1.0 && s.max == 1.0, || format!("alpha1 coefficient in [{}, {}]", s.min, s.max))?;

    let a2 = check_contact(&rotational_alpha(), &cube, grid).map_err(|e| format!("alpha2 rejected: {e}"))?;
    let s = a2.summary();
    ensure((s.min - 2.0).abs() <= 1e-9 && (s.max - 2.0).abs() <= 1e-9, || {
        format!("alpha2 coefficient in [{}, {}]", s.min, s.max)
    })?;

    let a3 = check_contact(&overtwisted_alpha(), &Domain::cube(-3.0, 3.0), grid)
        .map_err(|e| format!("alpha3 rejected: {e}"))?;
    ensure(a3.summary().min > 0.0, || format!("alpha3 minimum {}", a3.summary().min))?;
    // independent closed form 1 + sin r cos r / r
    let mut worst: f64 = 0.0;
    for i in 0..=40 {
        for j in 0..=40 {
            let (x, y) = (-3.0 + 0.15 * i as f64, -3.0 + 0.15 * j as f64);
            let r = x.hypot(y);
            let expected = if r == 0.0 { 2.0 } else { 1.0 + r.sin() * r.cos() / r };
            let got = a3.volume_coefficient([x, y, 0.7]).map_err(|e| e.to_string())?;
            worst = worst.max((got - expected).abs());
        }
    }
    ensure(worst <= 1e-9, || format!("alpha3 deviates from 1 + sin r cos r / r by {worst}"))?;
    let mut half_pi_err: f64 = 0.0;
    for k in 0..8 {
        let th = 2.0 * PI * k as f64 / 8.0;
        let p = [PI / 2.0 * th.cos(), PI / 2.0 * th.sin(), -1.0 + 0.25 * k as f64];
        half_pi_err = half_pi_err.max((a3.volume_coefficient(p).map_err(|e| e.to_string())? - 1.0).abs());
    }
    ensure(half_pi_err <= 1e-9, || format!("alpha3 at r = pi/2 off by {half_pi_err}"))?;

    let dz = DifferentialForm::one_form(Expr::zero(), Expr::zero(), Expr::one());
    match check_contact(&dz, &cube, grid) {
        Err(ContactError::NotContact(rep)) => {
            ensure(rep.failure_count == rep.nodes && rep.min == 0.0 && rep.max == 0.0, || {
                format!("dz fails at {} of {} nodes, range [{}, {}]", rep.failure_count, rep.nodes, rep.min, rep.max)
            })?;
        }
        other => return Err(format!("dz not rejected as non-contact: {other:?}")),
    }
    Ok(format!(
        "alpha1 = 1, alpha2 = 2, alpha3 min {:.4} (closed form within {worst:.1e}), dz rejected",
        a3.summary().min
    ))
}

fn sphere_foliation() -> Outcome {
    let xi2 = xi2();
    let mut notes = Vec::new();
    for (name, s) in [("polar chart", sphere()), ("equatorial chart", sphere_x_poles())] {
        let rep = foliate(&xi2, &s, &FoliationOptions::default()).map_err(|e| e.to_string())?;
        ensure(rep.status == ReportStatus::Ok, || format!("{name}: status {:?}", rep.status))?;
        ensure(rep.singularities.len() == 2, || format!("{name}: {} singularities", rep.singularities.len()))?;
        let mut signs = Vec::new();
        for p in &rep.singularities {
            let pole_dist = [1.0, -1.0]
                .map(|z: f64| ((p.point[0]).powi(2) + p.point[1].powi(2) + (p.point[2] - z).powi(2)).sqrt())
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            ensure(pole_dist <= 1e-6, || format!("{name}: singularity {:?} is {pole_dist} from a pole", p.point))?;
            ensure(p.kind == SingularityKind::Elliptic, || format!("{name}: {:?} point", p.kind))?;
            if p.sign == SingularitySign::Positive {
                ensure(p.flow == Some(FlowType::Source), || format!("{name}: positive point is {:?}", p.flow))?;
            }
            signs.push(p.sign);
        }
        ensure(signs.contains(&SingularitySign::Positive) && signs.contains(&SingularitySign::Negative), || {
            format!("{name}: signs {signs:?}")
        })?;
        ensure(rep.chi_computed == Some(2) && rep.euler_class_computed == Some(0), || {
            format!("{name}: chi {:?}, e {:?}", rep.chi_computed, rep.euler_class_computed)
        })?;
        let bound = check_genus_bound(&rep).map_err(|e| e.to_string())?;
        ensure(bound.satisfied, || format!("{name}: genus bound {bound:?}"))?;
        notes.push(name);
    }
    Ok(format!("{}: 2 elliptic poles, chi 2, e 0, |e| <= 0", notes.join(" and ")))
}

fn overtwisted() -> Outcome {
    let xi3 = ContactForm::assume(overtwisted_alpha(), Domain::cube(-4.0, 4.0)).map_err(|e| e.to_string())?;
    let opts = FoliationOptions::default();
    let flat = overtwisted_witness(&xi3, &flat_disk(), &opts).map_err(|e| e.to_string())?;
    ensure(flat.found && matches!(flat.evidence, WitnessEvidence::SingularBoundary { .. }), || {
        format!("flat disk: {:?}", flat.evidence)
    })?;
    let pushed = overtwisted_witness(&xi3, &pushed_disk(0.5), &opts).map_err(|e| e.to_string())?;
    let WitnessEvidence::ClosedBoundaryLeaf { leaf: Some(leaf), .. } = &pushed.evidence else {
        return Err(format!("pushed disk: {:?}", pushed.evidence));
    };
    ensure(pushed.found && leaf.recurrence <= 1e-6, || format!("pushed disk recurrence {}", leaf.recurrence))?;
    Ok(format!(
        "flat disk boundary singular; pushed disk boundary leaf closes (period {:.6}, recurrence {:.1e})",
        leaf.period, leaf.recurrence
    ))
}

fn dividing() -> Outcome {
    let s = torus_sine();
    let rep = dividing_set(
        &pullback(&xi1_quotient(), &s).map_err(|e| e.to_string())?,
        &s,
        &FoliationOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    ensure(rep.status == DividingStatus::Certified, || format!("status {:?}: {:?}", rep.status, rep.reason))?;
    ensure(rep.gamma.len() == 2, || format!("{} components", rep.gamma.len()))?;
    let mut heights = Vec::new();
    for g in &rep.gamma {
        ensure(g.closed, || "open component".into())?;
        let z: Vec<f64> = g.points.iter().map(|p| s.wrap(*p)[1]).collect();
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let target = if mean < 0.5 { 0.25 } else { 0.75 };
        let dev = z.iter().map(|v| (v - target).abs()).fold(0.0, f64::max);
        ensure(dev <= 1e-4, || format!("component deviates {dev} from z = {target}"))?;
        heights.push(target);
    }
    heights.sort_by(f64::total_cmp);
    ensure(heights == [0.25, 0.75], || format!("components at {heights:?}"))?;
    Ok("two circles at z = 1/4 and z = 3/4, certified".into())
}

fn front_invariants() -> Outcome {
    let inv = |w: &FrontWord| invariants(&orient(w));
    let u = inv(&parse_front("L1 R1").map_err(|e| e.to_string())?);
    ensure((u.tb, u.r) == (-1, 0), || format!("unknot {u:?}"))?;

    let t = parse_front("L1 L3 X2 X2 X2 R3 R1").map_err(|e| e.to_string())?;
    let ti = inv(&t);
    ensure((ti.tb, ti.r) == (1, 0), || format!("trefoil {ti:?}"))?;
    let sd = seifert_surface(&underlying_diagram(&orient(&t)).map_err(|e| e.to_string())?);
    ensure((sd.s, sd.c, sd.chi) == (2, 3, -1), || format!("trefoil Seifert data {sd:?}"))?;
    let b = bennequin_check(&ti, &sd);
    ensure(b.legendrian_ok && b.legendrian_slack == 0, || format!("trefoil Bennequin {b:?}"))?;

    let st = inv(&examples::stabilized_unknot());
    ensure(st.tb == -2 && st.r.abs() == 1, || format!("stabilized unknot {st:?}"))?;
    Ok(format!("unknot (-1, 0); trefoil (1, 0) with tb + |r| = -chi = 1; stabilized unknot (-2, {})", st.r))
}

const CASES: u64 = 1000;

fn property_suites() -> Outcome {
    let mut failures = Vec::new();
    let mut note = |name: &str, bad: usize| {
        if bad > 0 {
            failures.push(format!("{name}: {bad} failures"));
        }
    };

    let mut bad = 0;
    let mut steps = 0;
    for seed in 0..CASES {
        let mut r = rng(seed);
        let mut w = random_word(&mut r, 20);
        let i0 = invariants(&orient(&w));
        let p0 = knot_proxies(&underlying_diagram(&orient(&w)).unwrap()).unwrap();
        for _ in 0..r.gen_range(1..=6) {
            let Some(mv) = random_move(&mut r, &w) else { break };
            w = apply_move(&w, mv).unwrap();
            steps += 1;
            let i1 = invariants(&orient(&w));
            let p1 = knot_proxies(&underlying_diagram(&orient(&w)).unwrap()).unwrap();
            if (i0.tb, i0.r) != (i1.tb, i1.r) || p0 != p1 {
                bad += 1;
            }
        }
    }
    note("move invariance", bad);

    let mut bad = 0;
    for seed in 0..CASES {
        let mut r = rng(10_000 + seed);
        let w = random_word(&mut r, 24);
        let site = random_site(&mut r, &w);
        let sign = random_sign(&mut r);
        let a = invariants(&orient(&w));
        let b = invariants(&orient(&stabilize(&w, sign, site).unwrap()));
        let dr = if sign == StabilizationSign::Positive { 1 } else { -1 };
        if b.tb != a.tb - 1 || b.r != a.r + dr {
            bad += 1;
        }
    }
    note("stabilization", bad);

    let (mut push_bad, mut rev_bad, mut benn_bad) = (0, 0, 0);
    for seed in 0..CASES {
        let w = random_word(&mut rng(20_000 + seed), 24);
        let f = orient(&w);
        let i = invariants(&f);
        if i.l_plus + i.l_minus != 2 * i.tb || i.l_plus - i.l_minus != -2 * i.r {
            push_bad += 1;
        }
        let j = invariants(&f.reverse());
        if j.r != -i.r || j.tb != i.tb || j.w != i.w {
            rev_bad += 1;
        }
        let sd = seifert_surface(&underlying_diagram(&f).unwrap());
        let b = bennequin_check(&i, &sd);
        if !(b.legendrian_ok && b.transverse_ok) {
            benn_bad += 1;
        }
    }
    note("pushoff identities", push_bad);
    note("orientation reversal", rev_bad);
    note("Bennequin", benn_bad);

    let mut bad = 0;
    let opts = FoliationOptions::default();
    let mut r = rng(30_000);
    for k in 0..50 {
        let (alpha, s) = if k % 2 == 0 {
            (xi2(), perturbed_sphere(&mut r, 0.05))
        } else {
            (xi1_quotient(), perturbed_torus(&mut r, 0.05))
        };
        let set = find_singularities(&pullback(&alpha, &s).unwrap(), &s, &opts).unwrap();
        let rep = census_and_counts(&set, s.topology(), &opts);
        if rep.status != ReportStatus::Ok || rep.chi_computed != Some(s.topology().euler_characteristic()) {
            bad += 1;
        }
    }
    note("Poincare-Hopf", bad);

    let mut bad = 0;
    for seed in 0..CASES {
        let mut r = rng(40_000 + seed);
        let degree = r.gen_range(0..2);
        let f = random_form(&mut r, degree, 4);
        let dd = f.exterior_derivative().unwrap().exterior_derivative().unwrap();
        let p = random_point(&mut r);
        let q = point_xyz(p[0], p[1], p[2]);
        let scale: f64 = f
            .coefficients()
            .iter()
            .flat_map(|c| Var::SPACE.map(|a| Var::SPACE.map(|b| c.diff(a).diff(b).eval(&q).abs())))
            .flatten()
            .sum();
        if dd.eval(&q).unwrap().iter().any(|v| v.abs() > 1e-12 * (1.0 + scale)) {
            bad += 1;
        }
    }
    note("d d = 0", bad);

    let mut bad = 0;
    let h = 1e-5;
    for seed in 0..CASES {
        let mut r = rng(50_000 + seed);
        let e = random_expr(&mut r, 5);
        let derivs = Var::SPACE.map(|v| e.diff(v).compile());
        let c = e.compile();
        for _ in 0..100 {
            let p = random_point(&mut r);
            for k in 0..3 {
                let (mut hi, mut lo) = (p, p);
                hi[k] += h;
                lo[k] -= h;
                let fd = (c.eval(&point_xyz(hi[0], hi[1], hi[2])) - c.eval(&point_xyz(lo[0], lo[1], lo[2]))) / (2.0 * h);
                let exact = derivs[k].eval(&point_xyz(p[0], p[1], p[2]));
                if (fd - exact).abs() > 1e-6 * exact.abs().max(1.0) {
                    bad += 1;
                }
            }
        }
    }
    note("derivatives", bad);

    if failures.is_empty() {
        Ok(format!(
            "{CASES} cases each ({steps} move steps), 50 perturbed surfaces, {CASES} expressions x 100 points"
        ))
    } else {
        Err(failures.join("; "))
    }
}

/// Distance from `p` to the unit circle in the yz-plane.
fn circle_distance(p: [f64; 3]) -> f64 {
    p[0].hypot(p[1].hypot(p[2]) - 1.0)
}

fn approximation() -> Outcome {
    let poly: Vec<[f64; 3]> = (0..256)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 256.0;
            [0.0, t.cos(), t.sin()]
        })
        .collect();
    let eps = 0.1;
    let a = legendrian_approximate(&poly, eps, &ApproxOptions::default()).map_err(|e| e.to_string())?;
    FrontWord::new(a.word.events().to_vec()).map_err(|e| format!("front invalid: {e}"))?;

    // one direction exactly against the circle, the other by dense sampling
    let to_circle = a.curve.points.iter().map(|&p| circle_distance(p)).fold(0.0, f64::max);
    let from_circle = (0..4096)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 4096.0;
            let c = [0.0, t.cos(), t.sin()];
            a.curve
                .points
                .iter()
                .map(|p| ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    let dist = to_circle.max(from_circle);
    ensure(dist < eps && a.hausdorff < eps, || format!("Hausdorff {dist} (reported {})", a.hausdorff))?;

    let residual = a.curve.legendrian_residual();
    ensure(residual < 1e-9, || format!("Legendrian residual {residual}"))?;
    // the stored tangents belong to the sampled curve
    let n = a.curve.points.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let (p, q) = (a.curve.points[i], a.curve.points[(i + 1) % n]);
        let (s, t) = (a.curve.tangents[i], a.curve.tangents[(i + 1) % n]);
        let dt = 1.0 / n as f64;
        for k in 0..3 {
            let chord = q[k] - p[k];
            let trapezoid = 0.5 * dt * (s[k] + t[k]);
            worst = worst.max((chord - trapezoid).abs());
        }
    }
    ensure(worst < 1e-3 * eps, || format!("tangents disagree with samples by {worst}"))?;
    let tb = invariants(&orient(&a.word)).tb;
    ensure(tb <= -1, || format!("tb = {tb}"))?;
    Ok(format!(
        "{} events, Hausdorff {dist:.4}, residual {residual:.1e}, tb {tb}",
        a.word.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("contact-condition suite", contact_suite),
        ("sphere foliation", sphere_foliation),
        ("overtwisted witness", overtwisted),
        ("dividing set", dividing),
        ("front invariants", front_invariants),
        ("property suites", property_suites),
        ("approximation", approximation),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
