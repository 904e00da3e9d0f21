//! Legendrian fronts in `(R^3, ker(dz + x dy))`.
//!
//! A front is stored as a word of Morse events read left to right in the
//! `yz`-plane. `Lk` opens a left cusp between strands `k - 1` and `k`,
//! `Rk` closes strands `k` and `k + 1` with a right cusp, and `Xk` crosses
//! strands `k` and `k + 1`. Strands are counted from the top starting at 1.
//! Over/under is never stored: the descending strand of a crossing has the
//! larger `x = -dz/dy` and is always in front.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

mod approx;
mod geometry;
mod moves;
mod trace;

pub use approx::{hausdorff, legendrian_approximate, sweep_front, ApproxError, ApproxOptions, Approximation};
pub use geometry::{front_geometry, to_space_curve, FrontGeometry, SpaceCurve, SvgPath};
pub use moves::{available_moves, apply_move, stabilize, stabilize_oriented, Move, Site, StabilizationSign};
pub use trace::{invariants, orient, underlying_diagram, Direction, InvariantReport, OrientedFront};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Event {
    LeftCusp(usize),
    RightCusp(usize),
    Crossing(usize),
}

impl Event {
    /// 1-based strand index of the event.
    pub fn index(self) -> usize {
        match self {
            Event::LeftCusp(k) | Event::RightCusp(k) | Event::Crossing(k) => k,
        }
    }

    fn with_index(self, k: usize) -> Event {
        match self {
            Event::LeftCusp(_) => Event::LeftCusp(k),
            Event::RightCusp(_) => Event::RightCusp(k),
            Event::Crossing(_) => Event::Crossing(k),
        }
    }

    /// Strand count after the event, or `None` if the index is out of range.
    fn apply(self, n: usize) -> Option<usize> {
        match self {
            Event::LeftCusp(k) if (1..=n + 1).contains(&k) => Some(n + 2),
            Event::RightCusp(k) if k >= 1 && k < n => Some(n - 2),
            Event::Crossing(k) if k >= 1 && k < n => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::LeftCusp(k) => write!(f, "L{k}"),
            Event::RightCusp(k) => write!(f, "R{k}"),
            Event::Crossing(k) => write!(f, "X{k}"),
        }
    }
}

/// The validity rule a word or request broke.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Token,
    Empty,
    IndexOutOfRange,
    NonzeroFinalCount,
    MultipleComponents,
    PatternMismatch,
    InvalidSite,
    BaseCusp,
    Samples,
    Degenerate,
}

/// Validation failure. `location` is the 1-based event (or token) index.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct FrontError {
    pub rule: Rule,
    pub location: Option<usize>,
    pub message: String,
}

impl FrontError {
    pub(crate) fn new(rule: Rule, location: Option<usize>, message: impl Into<String>) -> Self {
        FrontError {
            rule,
            location,
            message: message.into(),
        }
    }
}

/// A valid knot front: profile starts and ends empty, every index is in
/// range, and tracing the strands gives a single closed component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrontWord {
    events: Vec<Event>,
}

impl FrontWord {
    pub fn new(events: Vec<Event>) -> Result<FrontWord, FrontError> {
        if events.is_empty() {
            return Err(FrontError::new(Rule::Empty, None, "empty front word"));
        }
        let mut n = 0usize;
        for (i, e) in events.iter().enumerate() {
            n = e.apply(n).ok_or_else(|| {
                let kind = match e {
                    Event::LeftCusp(_) => "LeftCusp",
                    Event::RightCusp(_) => "RightCusp",
                    Event::Crossing(_) => "Crossing",
                };
                FrontError::new(
                    Rule::IndexOutOfRange,
                    Some(i + 1),
                    format!("{kind} index out of range at event {}: {e} with {n} strands", i + 1),
                )
            })?;
        }
        if n != 0 {
            return Err(FrontError::new(
                Rule::NonzeroFinalCount,
                Some(events.len()),
                format!("word ends with {n} open strands"),
            ));
        }
        let word = FrontWord { events };
        let components = trace::component_count(&word);
        if components != 1 {
            return Err(FrontError::new(
                Rule::MultipleComponents,
                None,
                format!("front has {components} components; only knots are supported"),
            ));
        }
        Ok(word)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Strand counts `n_0 = 0, n_1, ..., n_m = 0`.
    pub fn profile(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.events.len() + 1);
        let mut n = 0;
        out.push(n);
        for e in &self.events {
            n = e.apply(n).unwrap_or(n);
            out.push(n);
        }
        out
    }

    pub fn max_strands(&self) -> usize {
        self.profile().into_iter().max().unwrap_or(0)
    }

    pub fn cusp_count(&self) -> usize {
        self.events.iter().filter(|e| !matches!(e, Event::Crossing(_))).count()
    }

    pub fn crossing_count(&self) -> usize {
        self.events.len() - self.cusp_count()
    }
}

pub fn parse_front(text: &str) -> Result<FrontWord, FrontError> {
    let mut events = Vec::new();
    for (i, tok) in text.split_whitespace().enumerate() {
        let bad = || FrontError::new(Rule::Token, Some(i + 1), format!("token {} '{tok}' is not Lk, Rk or Xk", i + 1));
        let mut chars = tok.chars();
        let head = chars.next().ok_or_else(bad)?;
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let k: usize = digits.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        events.push(match head {
            'L' => Event::LeftCusp(k),
            'R' => Event::RightCusp(k),
            'X' => Event::Crossing(k),
            _ => return Err(bad()),
        });
    }
    FrontWord::new(events)
}

impl FromStr for FrontWord {
    type Err = FrontError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_front(s)
    }
}

impl fmt::Display for FrontWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.events.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl Serialize for FrontWord {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FrontWord {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_front(&text).map_err(serde::de::Error::custom)
    }
}

/// Standard words used in tests and examples.
pub mod examples {
    use super::{parse_front, FrontWord};

    pub fn unknot() -> FrontWord {
        parse_front("L1 R1").expect("valid word")
    }

    /// Right-handed trefoil with `tb = 1`, `r = 0`.
    pub fn trefoil() -> FrontWord {
        parse_front("L1 L3 X2 X2 X2 R3 R1").expect("valid word")
    }

    /// Unknot with one zig-zag.
    pub fn stabilized_unknot() -> FrontWord {
        parse_front("L1 L2 R1 R1").expect("valid word")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_and_trefoil_words_parse() {
        assert_eq!(parse_front("L1 R1").unwrap().len(), 2);
        let t = examples::trefoil();
        assert_eq!(t.profile(), vec![0, 2, 4, 4, 4, 4, 2, 0]);
        assert_eq!(t.to_string(), "L1 L3 X2 X2 X2 R3 R1");
    }

    #[test]
    fn right_cusp_out_of_range() {
        let e = parse_front("L1 R2").unwrap_err();
        assert_eq!(e.rule, Rule::IndexOutOfRange);
        assert_eq!(e.location, Some(2));
        assert!(e.message.contains("RightCusp"));
    }

    #[test]
    fn structural_errors() {
        assert_eq!(parse_front("").unwrap_err().rule, Rule::Empty);
        assert_eq!(parse_front("L1 L1").unwrap_err().rule, Rule::NonzeroFinalCount);
        let t = parse_front("L1 Q2").unwrap_err();
        assert_eq!((t.rule, t.location), (Rule::Token, Some(2)));
        assert_eq!(parse_front("L0 R1").unwrap_err().rule, Rule::Token);
        // two nested unknots
        assert_eq!(parse_front("L1 L2 R2 R1").unwrap_err().rule, Rule::MultipleComponents);
    }

    #[test]
    fn serde_uses_the_text_form() {
        let w = examples::trefoil();
        let json = serde_json::to_string(&w).unwrap();
        assert_eq!(json, "\"L1 L3 X2 X2 X2 R3 R1\"");
        let back: FrontWord = serde_json::from_str(&json).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<FrontWord>("\"L1 R2\"").is_err());
    }
}
