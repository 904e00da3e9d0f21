use std::collections::HashMap;

use super::{regularized, EvalError, Expr, Func, Node, Point};

/// One instruction; operands are indices of earlier instructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Const(u64),
    Load(usize),
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Powi(usize, i32),
    Call1(Func, usize),
    Call2(Func, usize, usize),
}

/// Straight-line program for fast repeated evaluation of an [`Expr`].
/// Structurally equal subexpressions are computed once.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
}

impl Compiled {
    pub fn new(e: &Expr) -> Self {
        let mut b = Builder::default();
        b.emit(e);
        Compiled { ops: b.ops }
    }

    /// Number of distinct instructions.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, p: &Point) -> f64 {
        let mut r: Vec<f64> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = match *op {
                Op::Const(bits) => f64::from_bits(bits),
                Op::Load(i) => p[i],
                Op::Neg(a) => -r[a],
                Op::Add(a, b) => r[a] + r[b],
                Op::Sub(a, b) => r[a] - r[b],
                Op::Mul(a, b) => r[a] * r[b],
                Op::Div(a, b) => r[a] / r[b],
                Op::Powi(a, n) => r[a].powi(n),
                Op::Call1(f, a) => f.apply(&[r[a]]),
                Op::Call2(f, a, b) => f.apply(&[r[a], r[b]]),
            };
            r.push(v);
        }
        r.last().copied().unwrap_or(f64::NAN)
    }

    /// Like [`Compiled::eval`] but resolves removable singularities and
    /// reports non-finite values.
    pub fn try_eval(&self, p: &Point) -> Result<f64, EvalError> {
        let v = self.eval(p);
        if v.is_finite() {
            return Ok(v);
        }
        regularized(|q| self.eval(q), p).ok_or_else(|| EvalError::NotFinite {
            expr: "<compiled>".into(),
            point: p.to_vec(),
        })
    }

    /// Finite value, regularizing if needed, NaN when both fail.
    pub fn eval_lenient(&self, p: &Point) -> f64 {
        self.try_eval(p).unwrap_or(f64::NAN)
    }
}

#[derive(Default)]
struct Builder {
    ops: Vec<Op>,
    index: HashMap<Op, usize>,
    // shared subtrees are usually shared `Arc`s, so the pointer cache
    // avoids re-walking them
    seen: HashMap<*const Node, usize>,
}

impl Builder {
    fn push(&mut self, op: Op) -> usize {
        if let Some(&i) = self.index.get(&op) {
            return i;
        }
        self.ops.push(op);
        self.index.insert(op, self.ops.len() - 1);
        self.ops.len() - 1
    }

    fn emit(&mut self, e: &Expr) -> usize {
        let key = e.node() as *const Node;
        if let Some(&i) = self.seen.get(&key) {
            return i;
        }
        let op = match e.node() {
            Node::Num(c) => Op::Const(c.to_bits()),
            Node::Pi => Op::Const(std::f64::consts::PI.to_bits()),
            Node::Var(v) => Op::Load(v.index()),
            Node::Neg(a) => Op::Neg(self.emit(a)),
            Node::Add(a, b) => Op::Add(self.emit(a), self.emit(b)),
            Node::Sub(a, b) => Op::Sub(self.emit(a), self.emit(b)),
            Node::Mul(a, b) => Op::Mul(self.emit(a), self.emit(b)),
            Node::Div(a, b) => Op::Div(self.emit(a), self.emit(b)),
            Node::Pow(a, n) => Op::Powi(self.emit(a), *n),
            Node::Call(f, args) => {
                if args.len() == 2 {
                    Op::Call2(*f, self.emit(&args[0]), self.emit(&args[1]))
                } else {
                    Op::Call1(*f, self.emit(&args[0]))
                }
            }
        };
        let i = self.push(op);
        self.seen.insert(key, i);
        i
    }
}
