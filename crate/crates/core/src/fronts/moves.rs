//! Legendrian Reidemeister moves and stabilizations as word rewrites.
//!
//! Every rewrite has an explicit precondition on the word. Insertions act on
//! a [`Site`]; pattern rewrites act on the 1-based event index where the
//! pattern starts. Event 1 (the base cusp) is never moved, so the default
//! orientation of the result agrees with that of the input.

use serde::{Deserialize, Serialize};

use super::trace::{orient, Direction, OrientedFront};
use super::{Event, FrontError, FrontWord, Rule};

use Event::{Crossing as X, LeftCusp as L, RightCusp as R};

/// Strand `strand` (1-based from the top) between events `slot` and
/// `slot + 1`, i.e. with `slot` events to its left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Site {
    pub slot: usize,
    pub strand: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    /// Type I: a kink `L(k+1) X(k) R(k+1)` hanging below the strand.
    #[serde(rename = "I")]
    KinkBelow { slot: usize, strand: usize },
    /// Type I rotated: the kink `L(k) X(k+1) R(k)` above the strand.
    #[serde(rename = "I'")]
    KinkAbove { slot: usize, strand: usize },
    /// Removes either kink pattern starting at `at`.
    #[serde(rename = "I-")]
    RemoveKink { at: usize },
    /// Type II: the cusp at `at` slides past the strand just above it.
    #[serde(rename = "II")]
    PassAbove { at: usize },
    /// Type II rotated: the cusp at `at` slides past the strand below it.
    #[serde(rename = "II'")]
    PassBelow { at: usize },
    /// Undoes either type II rewrite; the pattern starts at `at`.
    #[serde(rename = "II-")]
    Unpass { at: usize },
    /// Type III: `X(k) X(k+1) X(k)` and `X(k+1) X(k) X(k+1)` exchanged.
    #[serde(rename = "III")]
    Triangle { at: usize },
    /// Planar isotopy: events `at` and `at + 1` on disjoint strands swap.
    #[serde(rename = "commute")]
    Commute { at: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizationSign {
    #[serde(rename = "+", alias = "positive")]
    Positive,
    #[serde(rename = "-", alias = "negative")]
    Negative,
}

fn mismatch(at: usize, what: &str) -> FrontError {
    FrontError::new(Rule::PatternMismatch, Some(at), format!("no {what} pattern at event {at}"))
}

fn check_site(word: &FrontWord, site: Site) -> Result<(), FrontError> {
    let profile = word.profile();
    let n = profile.get(site.slot).copied().unwrap_or(0);
    if site.slot == 0 || site.slot >= profile.len() - 1 || site.strand == 0 || site.strand > n {
        return Err(FrontError::new(
            Rule::InvalidSite,
            Some(site.slot),
            format!("no strand {} after event {}", site.strand, site.slot),
        ));
    }
    Ok(())
}

fn splice(word: &FrontWord, start: usize, remove: usize, insert: &[Event]) -> Result<FrontWord, FrontError> {
    let mut events = word.events().to_vec();
    events.splice(start..start + remove, insert.iter().copied());
    FrontWord::new(events)
}

/// Events `at..at+len` (1-based), if they exist.
fn window(word: &FrontWord, at: usize, len: usize) -> Option<&[Event]> {
    if at == 0 {
        return None;
    }
    word.events().get(at - 1..at - 1 + len)
}

pub fn apply_move(word: &FrontWord, mv: Move) -> Result<FrontWord, FrontError> {
    match mv {
        Move::KinkBelow { slot, strand } => {
            check_site(word, Site { slot, strand })?;
            let k = strand;
            splice(word, slot, 0, &[L(k + 1), X(k), R(k + 1)])
        }
        Move::KinkAbove { slot, strand } => {
            check_site(word, Site { slot, strand })?;
            let k = strand;
            splice(word, slot, 0, &[L(k), X(k + 1), R(k)])
        }
        Move::RemoveKink { at } => match window(word, at, 3) {
            Some(&[L(a), X(b), R(c)]) if a == c && (a == b + 1 || b == a + 1) => splice(word, at - 1, 3, &[]),
            _ => Err(mismatch(at, "kink")),
        },
        Move::PassAbove { at } => {
            let replacement = match window(word, at, 1) {
                Some(&[L(k)]) if k >= 2 => [L(k - 1), X(k), X(k - 1)],
                Some(&[R(k)]) if k >= 2 => [X(k - 1), X(k), R(k - 1)],
                _ => return Err(mismatch(at, "cusp with a strand above")),
            };
            splice(word, at - 1, 1, &replacement)
        }
        Move::PassBelow { at } => {
            let n_in = word.profile().get(at.wrapping_sub(1)).copied().unwrap_or(0);
            let replacement = match window(word, at, 1) {
                Some(&[L(k)]) if k <= n_in => [L(k + 1), X(k), X(k + 1)],
                Some(&[R(k)]) if k + 2 <= n_in => [X(k + 1), X(k), R(k + 1)],
                _ => return Err(mismatch(at, "cusp with a strand below")),
            };
            splice(word, at - 1, 1, &replacement)
        }
        Move::Unpass { at } => {
            let replacement = match window(word, at, 3) {
                Some(&[L(j), X(a), X(b)]) if a == j + 1 && b == j => L(j + 1),
                Some(&[L(j), X(a), X(b)]) if j >= 2 && a == j - 1 && b == j => L(j - 1),
                Some(&[X(a), X(b), R(c)]) if b == a + 1 && c == a => R(a + 1),
                Some(&[X(a), X(b), R(c)]) if a >= 2 && b == a - 1 && c == a => R(a - 1),
                _ => return Err(mismatch(at, "cusp passage")),
            };
            if at == 1 {
                return Err(FrontError::new(Rule::BaseCusp, Some(at), "the base cusp is fixed"));
            }
            splice(word, at - 1, 3, &[replacement])
        }
        Move::Triangle { at } => match window(word, at, 3) {
            Some(&[X(a), X(b), X(c)]) if a == c && b == a + 1 => splice(word, at - 1, 3, &[X(b), X(a), X(b)]),
            Some(&[X(a), X(b), X(c)]) if a == c && a == b + 1 => splice(word, at - 1, 3, &[X(b), X(a), X(b)]),
            _ => Err(mismatch(at, "triangle")),
        },
        Move::Commute { at } => {
            if at == 1 {
                return Err(FrontError::new(Rule::BaseCusp, Some(at), "the base cusp is fixed"));
            }
            let Some(&[e1, e2]) = window(word, at, 2) else {
                return Err(mismatch(at, "commuting pair"));
            };
            let (f1, f2) = commute(e1, e2).ok_or_else(|| mismatch(at, "commuting pair"))?;
            splice(word, at - 1, 2, &[f1, f2])
        }
    }
}

/// Footprint of an event in a slot: a pair of strands `p, p + 1` or the
/// gap just above strand `g`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Foot {
    Pair(usize),
    Gap(usize),
}

impl Foot {
    /// Vertical key, doubled so both kinds compare on one axis.
    fn key(self) -> usize {
        match self {
            Foot::Pair(p) => 2 * p + 1,
            Foot::Gap(g) => 2 * g - 1,
        }
    }

    fn start(self) -> usize {
        match self {
            Foot::Pair(p) | Foot::Gap(p) => p,
        }
    }

    fn width(self) -> usize {
        match self {
            Foot::Pair(_) => 2,
            Foot::Gap(_) => 0,
        }
    }
}

/// Footprint in the slot after the event.
fn out_foot(e: Event) -> Foot {
    match e {
        L(a) | X(a) => Foot::Pair(a),
        R(a) => Foot::Gap(a),
    }
}

/// Footprint in the slot before the event.
fn in_foot(e: Event) -> Foot {
    match e {
        L(b) => Foot::Gap(b),
        R(b) | X(b) => Foot::Pair(b),
    }
}

/// Swaps adjacent events acting on disjoint strands, reindexing both so the
/// vertical order of everything in the middle slot is kept.
fn commute(e1: Event, e2: Event) -> Option<(Event, Event)> {
    let f1 = out_foot(e1);
    let f2 = in_foot(e2);
    let disjoint = match (f1, f2) {
        (Foot::Pair(a), Foot::Pair(b)) => a.abs_diff(b) >= 2,
        (Foot::Pair(a), Foot::Gap(g)) | (Foot::Gap(g), Foot::Pair(a)) => g != a + 1,
        (Foot::Gap(_), Foot::Gap(_)) => true,
    };
    if !disjoint {
        return None;
    }
    let e1_above = f1.key() <= f2.key();
    let through_above = |f: Foot, other: Foot, other_above: bool| f.start() - 1 - if other_above { other.width() } else { 0 };
    let i2 = 1 + through_above(f2, f1, e1_above) + if e1_above { in_foot(e1).width() } else { 0 };
    let i1 = 1 + through_above(f1, f2, !e1_above) + if e1_above { 0 } else { out_foot(e2).width() };
    Some((e2.with_index(i2), e1.with_index(i1)))
}

/// Every move that applies to `word`.
pub fn available_moves(word: &FrontWord) -> Vec<Move> {
    let profile = word.profile();
    let m = word.len();
    let mut out = Vec::new();
    for slot in 1..m {
        for strand in 1..=profile[slot] {
            out.push(Move::KinkBelow { slot, strand });
            out.push(Move::KinkAbove { slot, strand });
        }
    }
    for at in 1..=m {
        for mv in [
            Move::RemoveKink { at },
            Move::PassAbove { at },
            Move::PassBelow { at },
            Move::Unpass { at },
            Move::Triangle { at },
            Move::Commute { at },
        ] {
            if apply_move(word, mv).is_ok() {
                out.push(mv);
            }
        }
    }
    out
}

/// Adds a zig-zag on the segment at `site`, using the default orientation.
pub fn stabilize(word: &FrontWord, sign: StabilizationSign, site: Site) -> Result<FrontWord, FrontError> {
    stabilize_oriented(&orient(word), sign, site)
}

/// Adds a zig-zag so that `r` moves by `+1` (positive) or `-1` (negative)
/// for the given orientation. A zig-zag traversed downward through both
/// cusps is positive.
pub fn stabilize_oriented(f: &OrientedFront, sign: StabilizationSign, site: Site) -> Result<FrontWord, FrontError> {
    check_site(&f.word, site)?;
    let dir = f
        .direction_at(site.slot, site.strand - 1)
        .ok_or_else(|| FrontError::new(Rule::InvalidSite, Some(site.slot), "segment has no direction"))?;
    let k = site.strand;
    let down = [L(k + 1), R(k)];
    let up = [L(k), R(k + 1)];
    let zig = match (sign, dir) {
        (StabilizationSign::Positive, Direction::Right) | (StabilizationSign::Negative, Direction::Left) => down,
        _ => up,
    };
    splice(&f.word, site.slot, 0, &zig)
}
