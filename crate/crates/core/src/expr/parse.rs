//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := number | ident | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! In one-form mode the identifiers `dx dy dz` are accepted and the result
//! must be linear in them.

use thiserror::Error;

use super::{Expr, Func, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("function `{name}` at byte {offset} takes {expected} argument(s), got {found}")]
    Arity {
        offset: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("not a 1-form at byte {offset}: {message}")]
    NotOneForm { offset: usize, message: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::Arity { offset, .. }
            | ParseError::NotOneForm { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            _ if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let value = lit.parse::<f64>().map_err(|_| ParseError::Syntax {
                    offset: start,
                    message: format!("malformed number `{lit}`"),
                })?;
                out.push((Tok::Num(value), start));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

/// Intermediate value: a scalar, or a 1-form `c[0] dx + c[1] dy + c[2] dz`.
#[derive(Debug, Clone)]
pub(crate) enum Parsed {
    Scalar(Expr),
    Form([Expr; 3]),
}

impl Parsed {
    fn map(self, f: impl Fn(Expr) -> Expr) -> Parsed {
        match self {
            Parsed::Scalar(e) => Parsed::Scalar(f(e)),
            Parsed::Form(c) => Parsed::Form(c.map(f)),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    forms: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                message: format!("expected {what}"),
            })
        }
    }

    fn combine_additive(
        &self,
        a: Parsed,
        b: Parsed,
        sub: bool,
        offset: usize,
    ) -> Result<Parsed, ParseError> {
        let op = |x: Expr, y: Expr| if sub { Expr::sub(x, y) } else { Expr::add(x, y) };
        match (a, b) {
            (Parsed::Scalar(x), Parsed::Scalar(y)) => Ok(Parsed::Scalar(op(x, y))),
            (Parsed::Form(x), Parsed::Form(y)) => {
                let [x0, x1, x2] = x;
                let [y0, y1, y2] = y;
                Ok(Parsed::Form([op(x0, y0), op(x1, y1), op(x2, y2)]))
            }
            _ => Err(ParseError::NotOneForm {
                offset,
                message: "cannot add a function and a 1-form".into(),
            }),
        }
    }

    fn expr(&mut self) -> Result<Parsed, ParseError> {
        let mut acc = self.term()?;
        loop {
            let sub = match self.peek() {
                Tok::Plus => false,
                Tok::Minus => true,
                _ => return Ok(acc),
            };
            let (_, off) = self.bump();
            let rhs = self.term()?;
            acc = self.combine_additive(acc, rhs, sub, off)?;
        }
    }

    fn term(&mut self) -> Result<Parsed, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let div = match self.peek() {
                Tok::Star => false,
                Tok::Slash => true,
                _ => return Ok(acc),
            };
            let (_, off) = self.bump();
            let rhs = self.factor()?;
            acc = match (acc, rhs, div) {
                (Parsed::Scalar(a), Parsed::Scalar(b), false) => Parsed::Scalar(Expr::mul(a, b)),
                (Parsed::Scalar(a), Parsed::Scalar(b), true) => Parsed::Scalar(Expr::div(a, b)),
                (Parsed::Scalar(a), Parsed::Form(c), false)
                | (Parsed::Form(c), Parsed::Scalar(a), false) => {
                    Parsed::Form(c.map(|ci| Expr::mul(a.clone(), ci)))
                }
                (Parsed::Form(c), Parsed::Scalar(b), true) => {
                    Parsed::Form(c.map(|ci| Expr::div(ci, b.clone())))
                }
                _ => {
                    return Err(ParseError::NotOneForm {
                        offset: off,
                        message: "product of differentials is not a 1-form".into(),
                    })
                }
            };
        }
    }

    fn factor(&mut self) -> Result<Parsed, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.factor()?.map(Expr::neg));
        }
        let base_off = self.offset();
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let exp = self.integer_exponent()?;
        match base {
            Parsed::Scalar(b) => Ok(Parsed::Scalar(Expr::pow(b, exp))),
            Parsed::Form(_) => Err(ParseError::NotOneForm {
                offset: base_off,
                message: "power of a 1-form".into(),
            }),
        }
    }

    fn integer_exponent(&mut self) -> Result<i32, ParseError> {
        let paren = *self.peek() == Tok::LParen;
        if paren {
            self.bump();
        }
        let negative = *self.peek() == Tok::Minus;
        if negative {
            self.bump();
        }
        let off = self.offset();
        let n = match self.bump().0 {
            Tok::Num(v) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => v as i32,
            _ => {
                return Err(ParseError::Syntax {
                    offset: off,
                    message: "exponent must be an integer".into(),
                })
            }
        };
        if paren {
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(if negative { -n } else { n })
    }

    fn base(&mut self) -> Result<Parsed, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Parsed::Scalar(Expr::num(v))),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if *self.peek() == Tok::LParen {
                    let func = Func::from_name(&name).ok_or_else(|| {
                        ParseError::UnknownIdentifier {
                            offset: off,
                            name: name.clone(),
                        }
                    })?;
                    self.bump();
                    let mut args = Vec::new();
                    loop {
                        let arg_off = self.offset();
                        match self.expr()? {
                            Parsed::Scalar(e) => args.push(e),
                            Parsed::Form(_) => {
                                return Err(ParseError::NotOneForm {
                                    offset: arg_off,
                                    message: "differential inside a function argument".into(),
                                })
                            }
                        }
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen, "`)` or `,`")?;
                    if args.len() != func.arity() {
                        return Err(ParseError::Arity {
                            offset: off,
                            name,
                            expected: func.arity(),
                            found: args.len(),
                        });
                    }
                    return Ok(Parsed::Scalar(Expr::call(func, args)));
                }
                if name == "pi" {
                    return Ok(Parsed::Scalar(Expr::pi()));
                }
                if let Some(v) = Var::from_name(&name) {
                    return Ok(Parsed::Scalar(Expr::var(v)));
                }
                if self.forms {
                    let axis = match name.as_str() {
                        "dx" => Some(0),
                        "dy" => Some(1),
                        "dz" => Some(2),
                        _ => None,
                    };
                    if let Some(axis) = axis {
                        let mut c = [Expr::zero(), Expr::zero(), Expr::zero()];
                        c[axis] = Expr::one();
                        return Ok(Parsed::Form(c));
                    }
                }
                if Func::from_name(&name).is_some() {
                    return Err(ParseError::Arity {
                        offset: off,
                        name: name.clone(),
                        expected: Func::from_name(&name).map(Func::arity).unwrap_or(1),
                        found: 0,
                    });
                }
                Err(ParseError::UnknownIdentifier { offset: off, name })
            }
            Tok::End => Err(ParseError::Syntax {
                offset: off,
                message: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                offset: off,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }
}

fn run(text: &str, forms: bool) -> Result<Parsed, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        forms,
    };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(ParseError::Syntax {
            offset: p.offset(),
            message: "trailing input".into(),
        });
    }
    Ok(out)
}

/// Parses a scalar coordinate function.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    match run(text, false)? {
        Parsed::Scalar(e) => Ok(e),
        Parsed::Form(_) => unreachable!("differentials are rejected in scalar mode"),
    }
}

pub(crate) fn parse_with_differentials(text: &str) -> Result<Parsed, ParseError> {
    run(text, true)
}
