//! Seifert circles of oriented knot diagrams and the Bennequin inequality.
//!
//! Diagrams are planar-diagram codes: edges are labelled `1..=2c` in order
//! along the knot, and each crossing records its incoming and outgoing
//! under and over edges together with its sign.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::fronts::InvariantReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeifertError {
    #[error("crossing {crossing}: edge label {label} is outside 1..={max}")]
    Label { crossing: usize, label: usize, max: usize },
    #[error("crossing {crossing}: outgoing edge does not follow the incoming edge")]
    NotConsecutive { crossing: usize },
    #[error("edge {0} is not used exactly once as an incoming and once as an outgoing edge")]
    EdgeUse(usize),
    #[error("crossing {crossing}: sign must be +1 or -1")]
    Sign { crossing: usize },
    #[error("determinant overflowed 128-bit arithmetic")]
    Overflow,
}

/// One crossing, serialized as `[under_in, over_in, under_out, over_out, sign]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PdCrossing {
    pub under_in: usize,
    pub over_in: usize,
    pub under_out: usize,
    pub over_out: usize,
    pub sign: i8,
}

impl Serialize for PdCrossing {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        (self.under_in, self.over_in, self.under_out, self.over_out, self.sign).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PdCrossing {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (under_in, over_in, under_out, over_out, sign) = <(usize, usize, usize, usize, i8)>::deserialize(d)?;
        Ok(PdCrossing {
            under_in,
            over_in,
            under_out,
            over_out,
            sign,
        })
    }
}

/// Oriented knot diagram. An empty crossing list is the round unknot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Diagram {
    pub crossings: Vec<PdCrossing>,
}

impl<'de> Deserialize<'de> for Diagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let crossings = Vec::<PdCrossing>::deserialize(d)?;
        Diagram::new(crossings).map_err(serde::de::Error::custom)
    }
}

impl Diagram {
    /// Checks that labels run consecutively along a single component.
    pub fn new(crossings: Vec<PdCrossing>) -> Result<Diagram, SeifertError> {
        let edges = 2 * crossings.len();
        let next = |e: usize| e % edges + 1;
        let mut as_in = vec![0u8; edges + 1];
        let mut as_out = vec![0u8; edges + 1];
        for (i, c) in crossings.iter().enumerate() {
            for label in [c.under_in, c.over_in, c.under_out, c.over_out] {
                if label == 0 || label > edges {
                    return Err(SeifertError::Label {
                        crossing: i,
                        label,
                        max: edges,
                    });
                }
            }
            if c.under_out != next(c.under_in) || c.over_out != next(c.over_in) {
                return Err(SeifertError::NotConsecutive { crossing: i });
            }
            if c.sign != 1 && c.sign != -1 {
                return Err(SeifertError::Sign { crossing: i });
            }
            as_in[c.under_in] += 1;
            as_in[c.over_in] += 1;
            as_out[c.under_out] += 1;
            as_out[c.over_out] += 1;
        }
        if let Some(e) = (1..=edges).find(|&e| as_in[e] != 1 || as_out[e] != 1) {
            return Err(SeifertError::EdgeUse(e));
        }
        Ok(Diagram { crossings })
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn writhe(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    /// Cycles of the oriented smoothing: each incoming edge continues along
    /// the outgoing edge of the other strand.
    pub fn seifert_circles(&self) -> Vec<Vec<usize>> {
        if self.crossings.is_empty() {
            return vec![Vec::new()];
        }
        let edges = 2 * self.crossings.len();
        let mut smooth = vec![0usize; edges + 1];
        for c in &self.crossings {
            smooth[c.under_in] = c.over_out;
            smooth[c.over_in] = c.under_out;
        }
        let mut seen = vec![false; edges + 1];
        let mut circles = Vec::new();
        for start in 1..=edges {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut e = start;
            while !seen[e] {
                seen[e] = true;
                cycle.push(e);
                e = smooth[e];
            }
            circles.push(cycle);
        }
        circles
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeifertData {
    pub s: i64,
    pub c: i64,
    pub chi: i64,
    pub genus: i64,
}

pub fn seifert_surface(d: &Diagram) -> SeifertData {
    let s = d.seifert_circles().len() as i64;
    let c = d.crossing_count() as i64;
    let chi = s - c;
    SeifertData {
        s,
        c,
        chi,
        genus: (1 - chi) / 2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BennequinReport {
    /// `-chi` of the Seifert surface.
    pub bound: i64,
    pub legendrian_ok: bool,
    pub transverse_ok: bool,
    /// `-chi - (tb + |r|)`.
    pub legendrian_slack: i64,
    /// `-chi - max(l_plus, l_minus)`.
    pub transverse_slack: i64,
    /// A violation would contradict tightness of the standard structure.
    pub inconsistency: bool,
}

pub fn bennequin_check(inv: &InvariantReport, sd: &SeifertData) -> BennequinReport {
    let bound = -sd.chi;
    let legendrian_slack = bound - (inv.tb + inv.r.abs());
    let transverse_slack = bound - inv.l_plus.max(inv.l_minus);
    let legendrian_ok = legendrian_slack >= 0;
    let transverse_ok = transverse_slack >= 0;
    BennequinReport {
        bound,
        legendrian_ok,
        transverse_ok,
        legendrian_slack,
        transverse_slack,
        inconsistency: !(legendrian_ok && transverse_ok),
    }
}

/// Isotopy invariants used to confirm that rewrites keep the knot type.
/// The Alexander values are taken up to units, so powers of `t` are
/// divided out.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnotProxies {
    pub determinant: i128,
    pub alexander_at_2: i128,
    pub alexander_at_3: i128,
}

pub fn knot_proxies(d: &Diagram) -> Result<KnotProxies, SeifertError> {
    let strip = |mut v: i128, p: i128| {
        v = v.abs();
        while v != 0 && v % p == 0 {
            v /= p;
        }
        v
    };
    Ok(KnotProxies {
        determinant: alexander_at(d, -1)?.abs(),
        alexander_at_2: strip(alexander_at(d, 2)?, 2),
        alexander_at_3: strip(alexander_at(d, 3)?, 3),
    })
}

/// Wirtinger arcs: a new arc starts at each outgoing under edge.
fn arcs(d: &Diagram) -> Vec<usize> {
    let edges = 2 * d.crossings.len();
    let mut starts = vec![false; edges + 1];
    for c in &d.crossings {
        starts[c.under_out] = true;
    }
    let first = (1..=edges).find(|&e| starts[e]).unwrap_or(1);
    let mut arc = vec![0usize; edges + 1];
    let mut current = 0;
    for step in 0..edges {
        let e = (first - 1 + step) % edges + 1;
        if step > 0 && starts[e] {
            current += 1;
        }
        arc[e] = current;
    }
    arc
}

/// Alexander polynomial evaluated at an integer, from the Fox-calculus
/// matrix with one row and column removed.
pub fn alexander_at(d: &Diagram, t: i128) -> Result<i128, SeifertError> {
    let n = d.crossings.len();
    if n <= 1 {
        return Ok(1);
    }
    let arc = arcs(d);
    let mut m = vec![vec![0i128; n]; n];
    for (row, c) in d.crossings.iter().enumerate() {
        let (i, j, k) = (arc[c.over_in], arc[c.under_in], arc[c.under_out]);
        m[row][i] += 1 - t;
        if c.sign > 0 {
            m[row][j] += t;
            m[row][k] -= 1;
        } else {
            m[row][j] -= 1;
            m[row][k] += t;
        }
    }
    let mut minor: Vec<Vec<i128>> = m[..n - 1].iter().map(|r| r[..n - 1].to_vec()).collect();
    bareiss(&mut minor)
}

/// Fraction-free Gaussian elimination.
fn bareiss(a: &mut [Vec<i128>]) -> Result<i128, SeifertError> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return Ok(0);
            };
            a.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = a[i][j].checked_mul(a[k][k]).ok_or(SeifertError::Overflow)?;
                let rhs = a[i][k].checked_mul(a[k][j]).ok_or(SeifertError::Overflow)?;
                a[i][j] = lhs.checked_sub(rhs).ok_or(SeifertError::Overflow)? / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}
