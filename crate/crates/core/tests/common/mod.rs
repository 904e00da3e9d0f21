//! Generators shared by the property suites and the acceptance run.
#![allow(dead_code)]

use contact_core::contact::{rotational_alpha, standard_alpha, ContactForm, Domain};
use contact_core::expr::{Expr, Func, Var};
use contact_core::foliation::{Surface, Topology};
use contact_core::forms::DifferentialForm;
use contact_core::fronts::{available_moves, Event, FrontWord, Move, Site, StabilizationSign};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// A random single-component front with roughly `max_events` events.
pub fn random_word(rng: &mut StdRng, max_events: usize) -> FrontWord {
    loop {
        let mut events = vec![Event::LeftCusp(1)];
        let mut n = 2;
        let target = rng.gen_range(1..max_events.max(2));
        while events.len() < target {
            let roll: f64 = rng.gen();
            if roll < 0.25 && n < 8 {
                events.push(Event::LeftCusp(rng.gen_range(1..=n + 1)));
                n += 2;
            } else if roll < 0.4 && n >= 4 {
                events.push(Event::RightCusp(rng.gen_range(1..n)));
                n -= 2;
            } else {
                events.push(Event::Crossing(rng.gen_range(1..n)));
            }
        }
        while n > 0 {
            events.push(Event::RightCusp(rng.gen_range(1..n)));
            n -= 2;
        }
        if let Ok(w) = FrontWord::new(events) {
            return w;
        }
    }
}

/// A random applicable move, with the move kind drawn uniformly first so
/// that rare rewrites are not swamped by kink insertions.
pub fn random_move(rng: &mut StdRng, word: &FrontWord) -> Option<Move> {
    let moves = available_moves(word);
    let kind = |m: &Move| std::mem::discriminant(m);
    let mut kinds = Vec::new();
    for m in &moves {
        if !kinds.contains(&kind(m)) {
            kinds.push(kind(m));
        }
    }
    if kinds.is_empty() {
        return None;
    }
    let pick = kinds[rng.gen_range(0..kinds.len())];
    let same: Vec<Move> = moves.into_iter().filter(|m| kind(m) == pick).collect();
    Some(same[rng.gen_range(0..same.len())])
}

pub fn random_site(rng: &mut StdRng, word: &FrontWord) -> Site {
    let profile = word.profile();
    let slot = rng.gen_range(1..word.len());
    Site {
        slot,
        strand: rng.gen_range(1..=profile[slot]),
    }
}

pub fn random_sign(rng: &mut StdRng) -> StabilizationSign {
    if rng.gen() {
        StabilizationSign::Positive
    } else {
        StabilizationSign::Negative
    }
}

/// Smooth expression in `x, y, z` with moderate growth on `[-1, 1]^3`.
pub fn random_expr(rng: &mut StdRng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..4) {
            0 => Expr::num(rng.gen_range(-2.0..2.0)),
            k => Expr::var(Var::SPACE[k - 1]),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.gen_range(0..8) {
        0 => Expr::add(a, random_expr(rng, depth - 1)),
        1 => Expr::sub(a, random_expr(rng, depth - 1)),
        2 | 3 => Expr::mul(a, random_expr(rng, depth - 1)),
        4 => Expr::sin(a),
        5 => Expr::cos(a),
        6 => Expr::call(Func::Sinc, vec![a]),
        // powers of leaves only, so that nested powers do not turn
        // sin/cos/sinc into oscillators too fast for a fixed-step difference
        _ => Expr::pow(random_expr(rng, 0), rng.gen_range(2..4)),
    }
}

pub fn random_form(rng: &mut StdRng, degree: usize, depth: u32) -> DifferentialForm {
    let count = [1, 3, 3, 1][degree];
    let coeffs = (0..count).map(|_| random_expr(rng, depth)).collect();
    DifferentialForm::new(degree, coeffs).expect("coefficient count matches degree")
}

pub fn random_point(rng: &mut StdRng) -> [f64; 3] {
    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
}

pub fn xi2() -> ContactForm {
    ContactForm::assume(rotational_alpha(), Domain::cube(-2.0, 2.0)).expect("rotational form")
}

pub fn xi1_quotient() -> ContactForm {
    ContactForm::assume(standard_alpha(), Domain::quotient(-2.0, 2.0, 1.0, 1.0)).expect("standard form")
}

fn parse(text: &str) -> Expr {
    text.parse().expect("generated chart parses")
}

/// Unit sphere with x-axis chart poles, radially scaled by `1 + eps f`
/// for a random quadratic `f` of the ambient coordinates.
pub fn perturbed_sphere(rng: &mut StdRng, eps: f64) -> Surface {
    let (x, y, z) = ("cos(pi*u)", "sin(pi*u)*cos(2*pi*v)", "sin(pi*u)*sin(2*pi*v)");
    let c: Vec<f64> = (0..6).map(|_| eps * rng.gen_range(-1.0..1.0)).collect();
    let f = format!(
        "(1 + {:?}*{x} + {:?}*{y} + {:?}*{z} + {:?}*{x}*{y} + {:?}*{y}*{z} + {:?}*{z}*{z})",
        c[0], c[1], c[2], c[3], c[4], c[5]
    );
    Surface::new(
        [format!("{f}*{x}"), format!("{f}*{y}"), format!("{f}*{z}")].map(|s| parse(&s)),
        [false, true],
        Topology::Sphere,
        Vec::new(),
    )
    .expect("perturbed sphere")
}

/// `{x = sin(2 pi z) + eps g(y, z)}` with a random doubly periodic `g`.
pub fn perturbed_torus(rng: &mut StdRng, eps: f64) -> Surface {
    let c: Vec<f64> = (0..3).map(|_| eps * rng.gen_range(-1.0..1.0)).collect();
    let x = format!(
        "sin(2*pi*v) + {:?}*cos(2*pi*u) + {:?}*sin(2*pi*(u + v)) + {:?}*cos(4*pi*v)",
        c[0], c[1], c[2]
    );
    Surface::new([parse(&x), parse("u"), parse("v")], [true, true], Topology::Torus, Vec::new())
        .expect("perturbed torus")
}
