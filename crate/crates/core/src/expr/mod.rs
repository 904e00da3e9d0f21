//! Symbolic coordinate functions.
//!
//! Expressions are immutable trees over the variables `x y z u v t` with exact
//! symbolic differentiation. Constructors fold trivial constants (`0*e`, `1*e`,
//! `e+0`, numeric literals) but there is no general simplifier: two
//! expressions are compared numerically, never syntactically.

mod compile;
mod parse;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use compile::Compiled;
pub use parse::{parse_expression, ParseError};
pub(crate) use parse::{parse_with_differentials, Parsed};

/// Coordinate variables understood by the parser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
    U,
    V,
    T,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::X, Var::Y, Var::Z, Var::U, Var::V, Var::T];
    pub const SPACE: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::U => "u",
            Var::V => "v",
            Var::T => "t",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        Some(match name {
            "x" => Var::X,
            "y" => Var::Y,
            "z" => Var::Z,
            "u" => Var::U,
            "v" => Var::V,
            "t" => Var::T,
            _ => return None,
        })
    }
}

/// Builtin functions. `SincD(n)` is the n-th derivative of `sinc` and only
/// appears in differentiated expressions (printed as `sinc_d<n>`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Atan2,
    Sinc,
    SincD(u8),
}

impl Func {
    pub fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> String {
        match self {
            Func::Sin => "sin".into(),
            Func::Cos => "cos".into(),
            Func::Exp => "exp".into(),
            Func::Sqrt => "sqrt".into(),
            Func::Atan2 => "atan2".into(),
            Func::Sinc => "sinc".into(),
            Func::SincD(n) => format!("sinc_d{n}"),
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "atan2" => Func::Atan2,
            "sinc" => Func::Sinc,
            _ => {
                let n: u8 = name.strip_prefix("sinc_d")?.parse().ok()?;
                if n == 0 {
                    return None;
                }
                Func::SincD(n)
            }
        })
    }

    pub(crate) fn apply(self, args: &[f64]) -> f64 {
        match self {
            Func::Sin => args[0].sin(),
            Func::Cos => args[0].cos(),
            Func::Exp => args[0].exp(),
            Func::Sqrt => guarded_sqrt(args[0]),
            Func::Atan2 => args[0].atan2(args[1]),
            Func::Sinc => sinc_derivative(0, args[0]),
            Func::SincD(n) => sinc_derivative(n as u32, args[0]),
        }
    }
}

/// Square roots of round-off negatives are clamped to zero; genuinely negative
/// arguments evaluate to NaN and surface as a domain error.
fn guarded_sqrt(a: f64) -> f64 {
    if a < 0.0 && a > -1e-12 {
        0.0
    } else {
        a.sqrt()
    }
}

/// n-th derivative of sin(t)/t with the removable singularity filled.
pub fn sinc_derivative(n: u32, t: f64) -> f64 {
    if t.abs() < 1.5 {
        // termwise derivative of sum (-1)^m t^(2m) / (2m+1)!
        let mut sum = 0.0;
        let mut fact = 1.0; // (2m+1)!
        for m in 0..40u32 {
            if m > 0 {
                fact *= (2 * m) as f64 * (2 * m + 1) as f64;
            }
            let p = 2 * m;
            if p >= n {
                let mut falling = 1.0;
                for j in 0..n {
                    falling *= (p - j) as f64;
                }
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * falling * t.powi((p - n) as i32) / fact;
            }
        }
        sum
    } else {
        // Leibniz rule on sin(t) * t^-1
        let mut sum = 0.0;
        let mut binom = 1.0;
        for k in 0..=n {
            if k > 0 {
                binom = binom * (n - k + 1) as f64 / k as f64;
            }
            let dsin = match k % 4 {
                0 => t.sin(),
                1 => t.cos(),
                2 => -t.sin(),
                _ => -t.cos(),
            };
            let j = n - k;
            let mut coef = 1.0;
            for i in 1..=j {
                coef *= -(i as f64);
            }
            sum += binom * dsin * coef * t.powi(-(j as i32) - 1);
        }
        sum
    }
}

#[derive(Debug, PartialEq)]
pub enum Node {
    Num(f64),
    Pi,
    Var(Var),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Call(Func, Vec<Expr>),
}

/// A shared, immutable expression tree.
#[derive(Clone, Debug, PartialEq)]
pub struct Expr(Arc<Node>);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("expression `{expr}` is not finite at {point:?}")]
    NotFinite { expr: String, point: Vec<f64> },
}

/// Variable assignment indexed by [`Var::index`].
pub type Point = [f64; 6];

pub fn point_xyz(x: f64, y: f64, z: f64) -> Point {
    [x, y, z, 0.0, 0.0, 0.0]
}

pub fn point_uv(u: f64, v: f64) -> Point {
    [0.0, 0.0, 0.0, u, v, 0.0]
}

impl Expr {
    fn new(node: Node) -> Self {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(c: f64) -> Self {
        Expr::new(Node::Num(c))
    }

    pub fn zero() -> Self {
        Expr::num(0.0)
    }

    pub fn one() -> Self {
        Expr::num(1.0)
    }

    pub fn pi() -> Self {
        Expr::new(Node::Pi)
    }

    pub fn var(v: Var) -> Self {
        Expr::new(Node::Var(v))
    }

    pub fn as_num(&self) -> Option<f64> {
        match self.node() {
            Node::Num(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num() == Some(0.0)
    }

    fn is_one(&self) -> bool {
        self.as_num() == Some(1.0)
    }

    pub fn neg(a: Expr) -> Expr {
        match a.node() {
            Node::Num(c) => Expr::num(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::new(Node::Neg(a)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::num(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::new(Node::Add(a, b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::num(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::new(Node::Sub(a, b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero() || b.is_zero() {
            return Expr::zero();
        }
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) => Expr::num(x * y),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::new(Node::Mul(a, b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if a.is_zero() {
            return Expr::zero();
        }
        if b.is_one() {
            return a;
        }
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::num(x / y),
            _ => Expr::new(Node::Div(a, b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match n {
            0 => Expr::one(),
            1 => a,
            _ => match a.as_num() {
                Some(c) => Expr::num(c.powi(n)),
                None => Expr::new(Node::Pow(a, n)),
            },
        }
    }

    pub fn call(f: Func, args: Vec<Expr>) -> Expr {
        debug_assert_eq!(f.arity(), args.len());
        Expr::new(Node::Call(f, args))
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::call(Func::Sin, vec![a])
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::call(Func::Cos, vec![a])
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::call(Func::Exp, vec![a])
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::call(Func::Sqrt, vec![a])
    }

    pub fn sinc(a: Expr) -> Expr {
        Expr::call(Func::Sinc, vec![a])
    }

    pub fn atan2(y: Expr, x: Expr) -> Expr {
        Expr::call(Func::Atan2, vec![y, x])
    }

    /// Evaluates with plain IEEE semantics (may return NaN or infinity).
    pub fn eval(&self, p: &Point) -> f64 {
        match self.node() {
            Node::Num(c) => *c,
            Node::Pi => std::f64::consts::PI,
            Node::Var(v) => p[v.index()],
            Node::Neg(a) => -a.eval(p),
            Node::Add(a, b) => a.eval(p) + b.eval(p),
            Node::Sub(a, b) => a.eval(p) - b.eval(p),
            Node::Mul(a, b) => a.eval(p) * b.eval(p),
            Node::Div(a, b) => a.eval(p) / b.eval(p),
            Node::Pow(a, n) => a.eval(p).powi(*n),
            Node::Call(f, args) => match args.as_slice() {
                [a] => f.apply(&[a.eval(p)]),
                [a, b] => f.apply(&[a.eval(p), b.eval(p)]),
                _ => f64::NAN,
            },
        }
    }

    /// Evaluates and insists on a finite result. Removable singularities
    /// (0/0 from chain rules through `sqrt` at the origin) are resolved by
    /// averaging symmetric evaluations around the point.
    pub fn try_eval(&self, p: &Point) -> Result<f64, EvalError> {
        let direct = self.eval(p);
        if direct.is_finite() {
            return Ok(direct);
        }
        regularized(|q| self.eval(q), p).ok_or_else(|| EvalError::NotFinite {
            expr: self.to_string(),
            point: p.to_vec(),
        })
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, v: Var) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Pi => Expr::zero(),
            Node::Var(w) => {
                if *w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Neg(a) => Expr::neg(a.diff(v)),
            Node::Add(a, b) => Expr::add(a.diff(v), b.diff(v)),
            Node::Sub(a, b) => Expr::sub(a.diff(v), b.diff(v)),
            Node::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(v), b.clone()),
                Expr::mul(a.clone(), b.diff(v)),
            ),
            Node::Div(a, b) => {
                let da = a.diff(v);
                let db = b.diff(v);
                if db.is_zero() {
                    Expr::div(da, b.clone())
                } else {
                    Expr::div(
                        Expr::sub(Expr::mul(da, b.clone()), Expr::mul(a.clone(), db)),
                        Expr::pow(b.clone(), 2),
                    )
                }
            }
            Node::Pow(a, n) => Expr::mul(
                Expr::mul(Expr::num(*n as f64), Expr::pow(a.clone(), n - 1)),
                a.diff(v),
            ),
            Node::Call(f, args) => {
                let a = &args[0];
                let da = a.diff(v);
                if *f != Func::Atan2 && da.is_zero() {
                    return Expr::zero();
                }
                match f {
                    Func::Sin => Expr::mul(Expr::cos(a.clone()), da),
                    Func::Cos => Expr::neg(Expr::mul(Expr::sin(a.clone()), da)),
                    Func::Exp => Expr::mul(self.clone(), da),
                    Func::Sqrt => Expr::div(da, Expr::mul(Expr::num(2.0), self.clone())),
                    Func::Sinc => Expr::mul(Expr::call(Func::SincD(1), vec![a.clone()]), da),
                    Func::SincD(n) => {
                        Expr::mul(Expr::call(Func::SincD(n + 1), vec![a.clone()]), da)
                    }
                    Func::Atan2 => {
                        let (y, x) = (&args[0], &args[1]);
                        let (dy, dx) = (y.diff(v), x.diff(v));
                        if dy.is_zero() && dx.is_zero() {
                            return Expr::zero();
                        }
                        Expr::div(
                            Expr::sub(Expr::mul(x.clone(), dy), Expr::mul(y.clone(), dx)),
                            Expr::add(Expr::pow(x.clone(), 2), Expr::pow(y.clone(), 2)),
                        )
                    }
                }
            }
        }
    }

    /// Replaces variables by expressions (`subs[v.index()]`, `None` keeps `v`).
    pub fn substitute(&self, subs: &[Option<Expr>; 6]) -> Expr {
        match self.node() {
            Node::Num(_) | Node::Pi => self.clone(),
            Node::Var(v) => subs[v.index()].clone().unwrap_or_else(|| self.clone()),
            Node::Neg(a) => Expr::neg(a.substitute(subs)),
            Node::Add(a, b) => Expr::add(a.substitute(subs), b.substitute(subs)),
            Node::Sub(a, b) => Expr::sub(a.substitute(subs), b.substitute(subs)),
            Node::Mul(a, b) => Expr::mul(a.substitute(subs), b.substitute(subs)),
            Node::Div(a, b) => Expr::div(a.substitute(subs), b.substitute(subs)),
            Node::Pow(a, n) => Expr::pow(a.substitute(subs), *n),
            Node::Call(f, args) => {
                Expr::call(*f, args.iter().map(|a| a.substitute(subs)).collect())
            }
        }
    }

    /// Whether `v` occurs anywhere in the tree.
    pub fn depends_on(&self, v: Var) -> bool {
        match self.node() {
            Node::Num(_) | Node::Pi => false,
            Node::Var(w) => *w == v,
            Node::Neg(a) | Node::Pow(a, _) => a.depends_on(v),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.depends_on(v) || b.depends_on(v)
            }
            Node::Call(_, args) => args.iter().any(|a| a.depends_on(v)),
        }
    }

    pub fn compile(&self) -> Compiled {
        Compiled::new(self)
    }

    fn precedence(&self) -> u8 {
        match self.node() {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Num(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }
}

/// Averages `f` over symmetric offsets around `p` along a few generic
/// directions (every coordinate moves), accepting the result only when every
/// sample is finite.
pub(crate) fn regularized(f: impl Fn(&Point) -> f64, p: &Point) -> Option<f64> {
    const DIRS: [[f64; 6]; 4] = [
        [1.0, 0.618, 0.414, 0.732, 0.236, 0.303],
        [-0.618, 1.0, -0.732, 0.414, 0.303, -0.236],
        [0.414, -0.732, 1.0, -0.618, -0.236, 0.303],
        [-0.732, -0.414, 0.618, 1.0, 0.303, 0.236],
    ];
    'scale: for h in [1e-7, 1e-5] {
        let mut acc = 0.0;
        for d in &DIRS {
            for s in [-1.0, 1.0] {
                let mut q = *p;
                for (qi, di) in q.iter_mut().zip(d) {
                    *qi += s * h * di;
                }
                let val = f(&q);
                if !val.is_finite() {
                    continue 'scale;
                }
                acc += val;
            }
        }
        return Some(acc / (2 * DIRS.len()) as f64);
    }
    None
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Num(c) => write!(f, "{c:?}"),
            Node::Pi => write!(f, "pi"),
            Node::Var(v) => write!(f, "{}", v.name()),
            Node::Neg(a) => {
                write!(f, "-")?;
                write_child(f, a, 4)
            }
            Node::Add(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " + ")?;
                write_child(f, b, 2)
            }
            Node::Sub(a, b) => {
                write_child(f, a, 1)?;
                write!(f, " - ")?;
                write_child(f, b, 2)
            }
            Node::Mul(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "*")?;
                write_child(f, b, 3)
            }
            Node::Div(a, b) => {
                write_child(f, a, 2)?;
                write!(f, "/")?;
                write_child(f, b, 3)
            }
            Node::Pow(a, n) => {
                write_child(f, a, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expression(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: &str) -> Expr {
        parse_expression(s).unwrap()
    }

    #[test]
    fn sinc_series_and_closed_form_agree() {
        for n in 0..4 {
            let h = 1e-9;
            let below = sinc_derivative(n, 1.5 - h);
            let above = sinc_derivative(n, 1.5 + h);
            assert!((below - above).abs() < 1e-7, "n={n}: {below} vs {above}");
        }
        assert_eq!(sinc_derivative(0, 0.0), 1.0);
        assert!(sinc_derivative(1, 0.0).abs() < 1e-15);
        assert!((sinc_derivative(2, 0.0) + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sinc_of_radius_is_one_at_axis() {
        let ex = e("sinc(sqrt(x^2+y^2))");
        assert_eq!(ex.eval(&point_xyz(0.0, 0.0, 5.0)), 1.0);
    }

    #[test]
    fn chain_rule_through_sqrt_regularizes_at_origin() {
        let ex = e("cos(sqrt(x^2+y^2))").diff(Var::X);
        assert!(ex.eval(&point_xyz(0.0, 0.0, 0.0)).is_nan());
        let v = ex.try_eval(&point_xyz(0.0, 0.0, 0.0)).unwrap();
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn negative_sqrt_is_a_domain_error() {
        assert!(e("sqrt(x)").try_eval(&point_xyz(-1.0, 0.0, 0.0)).is_err());
        assert_eq!(e("sqrt(x)").eval(&point_xyz(-1e-14, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn constructors_fold_constants() {
        assert!(Expr::mul(Expr::zero(), e("x")).is_zero());
        assert_eq!(Expr::add(Expr::num(2.0), Expr::num(3.0)).as_num(), Some(5.0));
        assert_eq!(e("x").diff(Var::Y).as_num(), Some(0.0));
    }

    #[test]
    fn substitution_composes() {
        let f = e("x*y + z");
        let mut subs: [Option<Expr>; 6] = Default::default();
        subs[0] = Some(e("u"));
        subs[1] = Some(e("v"));
        subs[2] = Some(Expr::zero());
        let g = f.substitute(&subs);
        assert_eq!(g.eval(&point_uv(2.0, 3.0)), 6.0);
        assert!(!g.depends_on(Var::X));
    }
}
