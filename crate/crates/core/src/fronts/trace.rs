use serde::{Deserialize, Serialize};

use super::{Event, FrontError, FrontWord, Rule};
use crate::seifert::{Diagram, PdCrossing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Right,
    Left,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Right => Direction::Left,
            Direction::Left => Direction::Right,
        }
    }
}

/// Strand state between events: `slot` events lie to the left, `pos` is the
/// 0-based strand index from the top.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub(crate) struct State {
    pub slot: usize,
    pub pos: usize,
    pub dir: Direction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Step {
    Segment(State),
    /// Passage through crossing `event` (0-based); `over` is the descending strand.
    Crossing { event: usize, over: bool, dir: Direction },
    /// `down` when traversal passes from the upper to the lower branch.
    Cusp { event: usize, down: bool },
}

/// Moves from `s` through the next event, recording what was crossed.
fn advance(word: &FrontWord, s: State, steps: &mut Vec<Step>) -> State {
    let events = word.events();
    match s.dir {
        Direction::Right => {
            let j = s.slot;
            let p = s.pos;
            match events[j] {
                Event::LeftCusp(k) => {
                    let k0 = k - 1;
                    let pos = if p < k0 { p } else { p + 2 };
                    State { slot: j + 1, pos, dir: s.dir }
                }
                Event::RightCusp(k) => {
                    let k0 = k - 1;
                    if p == k0 || p == k0 + 1 {
                        steps.push(Step::Cusp { event: j, down: p == k0 });
                        State {
                            slot: j,
                            pos: if p == k0 { k0 + 1 } else { k0 },
                            dir: Direction::Left,
                        }
                    } else {
                        let pos = if p < k0 { p } else { p - 2 };
                        State { slot: j + 1, pos, dir: s.dir }
                    }
                }
                Event::Crossing(k) => {
                    let k0 = k - 1;
                    let pos = if p == k0 {
                        steps.push(Step::Crossing { event: j, over: true, dir: s.dir });
                        k0 + 1
                    } else if p == k0 + 1 {
                        steps.push(Step::Crossing { event: j, over: false, dir: s.dir });
                        k0
                    } else {
                        p
                    };
                    State { slot: j + 1, pos, dir: s.dir }
                }
            }
        }
        Direction::Left => {
            let j = s.slot - 1;
            let p = s.pos;
            match events[j] {
                Event::LeftCusp(k) => {
                    let k0 = k - 1;
                    if p == k0 || p == k0 + 1 {
                        steps.push(Step::Cusp { event: j, down: p == k0 });
                        State {
                            slot: s.slot,
                            pos: if p == k0 { k0 + 1 } else { k0 },
                            dir: Direction::Right,
                        }
                    } else {
                        let pos = if p < k0 { p } else { p - 2 };
                        State { slot: j, pos, dir: s.dir }
                    }
                }
                Event::RightCusp(k) => {
                    let k0 = k - 1;
                    let pos = if p < k0 { p } else { p + 2 };
                    State { slot: j, pos, dir: s.dir }
                }
                Event::Crossing(k) => {
                    let k0 = k - 1;
                    let pos = if p == k0 {
                        // came from the lower-left strand: ascending, behind
                        steps.push(Step::Crossing { event: j, over: false, dir: s.dir });
                        k0 + 1
                    } else if p == k0 + 1 {
                        steps.push(Step::Crossing { event: j, over: true, dir: s.dir });
                        k0
                    } else {
                        p
                    };
                    State { slot: j, pos, dir: s.dir }
                }
            }
        }
    }
}

/// Closed traversal starting at `start`.
pub(crate) fn trace_from(word: &FrontWord, start: State) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut s = start;
    loop {
        steps.push(Step::Segment(s));
        s = advance(word, s, &mut steps);
        if s == start {
            return steps;
        }
    }
}

/// Base point: upper branch of the first left cusp, moving right.
pub(crate) fn base_state(word: &FrontWord) -> State {
    let k = word.events()[0].index();
    State {
        slot: 1,
        pos: k - 1,
        dir: Direction::Right,
    }
}

/// Number of closed components, counted on words whose events are in range.
pub(crate) fn component_count(word: &FrontWord) -> usize {
    let profile = word.profile();
    let mut seen: Vec<Vec<bool>> = profile.iter().map(|&n| vec![false; n]).collect();
    let mut count = 0;
    for slot in 1..profile.len() - 1 {
        for pos in 0..profile[slot] {
            if seen[slot][pos] {
                continue;
            }
            count += 1;
            let start = State {
                slot,
                pos,
                dir: Direction::Right,
            };
            for step in trace_from(word, start) {
                if let Step::Segment(s) = step {
                    seen[s.slot][s.pos] = true;
                }
            }
        }
    }
    count
}

/// A front with its traversal direction: the default orientation or its
/// reverse.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrientedFront {
    pub word: FrontWord,
    #[serde(default)]
    pub reversed: bool,
}

pub fn orient(word: &FrontWord) -> OrientedFront {
    OrientedFront {
        word: word.clone(),
        reversed: false,
    }
}

impl OrientedFront {
    pub fn reverse(&self) -> OrientedFront {
        OrientedFront {
            word: self.word.clone(),
            reversed: !self.reversed,
        }
    }

    pub(crate) fn steps(&self) -> Vec<Step> {
        let steps = trace_from(&self.word, base_state(&self.word));
        if !self.reversed {
            return steps;
        }
        steps
            .into_iter()
            .rev()
            .map(|st| match st {
                Step::Segment(s) => Step::Segment(State {
                    dir: s.dir.flip(),
                    ..s
                }),
                Step::Crossing { event, over, dir } => Step::Crossing {
                    event,
                    over,
                    dir: dir.flip(),
                },
                Step::Cusp { event, down } => Step::Cusp { event, down: !down },
            })
            .collect()
    }

    /// Direction of every strand segment, indexed by slot then position.
    pub fn segment_directions(&self) -> Vec<Vec<Direction>> {
        let profile = self.word.profile();
        let mut out: Vec<Vec<Direction>> = profile.iter().map(|&n| vec![Direction::Right; n]).collect();
        for st in self.steps() {
            if let Step::Segment(s) = st {
                out[s.slot][s.pos] = s.dir;
            }
        }
        out
    }

    pub fn direction_at(&self, slot: usize, pos: usize) -> Option<Direction> {
        self.segment_directions().get(slot)?.get(pos).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub w: i64,
    pub c: i64,
    pub c_u: i64,
    pub c_d: i64,
    pub tb: i64,
    pub r: i64,
    pub l_plus: i64,
    pub l_minus: i64,
}

/// Per-crossing passages in traversal order.
struct Passage {
    event: usize,
    over: bool,
    dir: Direction,
    incoming: usize,
}

fn passages(steps: &[Step]) -> Vec<Passage> {
    let mut out = Vec::new();
    for st in steps {
        if let Step::Crossing { event, over, dir } = *st {
            out.push(Passage {
                event,
                over,
                dir,
                incoming: out.len(),
            });
        }
    }
    out
}

/// `+1` when both strands run the same horizontal direction; with the
/// descending strand in front this makes the standard trefoil positive.
fn crossing_sign(a: Direction, b: Direction) -> i8 {
    if a == b {
        1
    } else {
        -1
    }
}

pub fn invariants(f: &OrientedFront) -> InvariantReport {
    let steps = f.steps();
    let mut dirs: Vec<Option<Direction>> = vec![None; f.word.len()];
    let mut w = 0i64;
    let (mut c_u, mut c_d) = (0i64, 0i64);
    for st in &steps {
        match *st {
            Step::Crossing { event, dir, .. } => match dirs[event] {
                None => dirs[event] = Some(dir),
                Some(other) => w += crossing_sign(other, dir) as i64,
            },
            Step::Cusp { down, .. } => {
                if down {
                    c_d += 1
                } else {
                    c_u += 1
                }
            }
            Step::Segment(_) => {}
        }
    }
    let c = c_u + c_d;
    // c is even for any closed front and c_d - c_u is even for knots
    let tb = w - c / 2;
    let r = (c_d - c_u) / 2;
    InvariantReport {
        w,
        c,
        c_u,
        c_d,
        tb,
        r,
        l_plus: tb - r,
        l_minus: tb + r,
    }
}

/// Planar-diagram code of the underlying knot: cusps are smoothed, edges
/// are numbered `1..=2c` along the orientation starting at the base point,
/// and the descending strand is over at each crossing.
pub fn underlying_diagram(f: &OrientedFront) -> Result<Diagram, FrontError> {
    let steps = f.steps();
    let ps = passages(&steps);
    let total = ps.len();
    let label = |e: usize| e % total.max(1) + 1;
    let mut per_event: Vec<Vec<&Passage>> = (0..f.word.len()).map(|_| Vec::new()).collect();
    for p in &ps {
        per_event[p.event].push(p);
    }
    let mut crossings = Vec::new();
    for (event, list) in per_event.iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        let (Some(over), Some(under)) = (list.iter().find(|p| p.over), list.iter().find(|p| !p.over)) else {
            return Err(FrontError::new(Rule::Degenerate, Some(event + 1), "crossing was not traversed twice"));
        };
        crossings.push(PdCrossing {
            under_in: label(under.incoming),
            over_in: label(over.incoming),
            under_out: label(under.incoming + 1),
            over_out: label(over.incoming + 1),
            sign: crossing_sign(over.dir, under.dir),
        });
    }
    Diagram::new(crossings).map_err(|e| FrontError::new(Rule::Degenerate, None, e.to_string()))
}
