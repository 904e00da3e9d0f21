//! Differential forms on R^3 with expression coefficients.
//!
//! A k-form stores one coefficient per strictly increasing multi-index over
//! `(dx, dy, dz)`; multi-indices are bitmasks (`dx = 1`, `dy = 2`, `dz = 4`).

use std::fmt;

use thiserror::Error;

use crate::expr::{parse_with_differentials, EvalError, Expr, ParseError, Parsed, Point, Var};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("degree {0} is outside 0..=3")]
    BadDegree(usize),
    #[error("wedge of degrees {0} and {1} exceeds 3")]
    DegreeOverflow(usize, usize),
    #[error("exterior derivative of a 3-form on R^3 is not representable")]
    TopDegree,
    #[error("expected a {expected}-form, got a {found}-form")]
    WrongDegree { expected: usize, found: usize },
    #[error("expected {expected} coefficients, got {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

const BASES: [&[u8]; 4] = [&[0], &[1, 2, 4], &[3, 5, 6], &[7]];

fn basis(degree: usize) -> &'static [u8] {
    BASES[degree]
}

fn basis_name(mask: u8) -> String {
    let names = ["dx", "dy", "dz"];
    let parts: Vec<&str> = (0..3).filter(|i| mask & (1 << i) != 0).map(|i| names[i]).collect();
    parts.join("^")
}

/// Sign of the permutation sorting the concatenation of `a` then `b`.
fn merge_sign(a: u8, b: u8) -> f64 {
    let mut inversions = 0;
    for i in 0..3 {
        if a & (1 << i) != 0 {
            for j in 0..i {
                if b & (1 << j) != 0 {
                    inversions += 1;
                }
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug)]
pub struct DifferentialForm {
    degree: usize,
    coeffs: Vec<Expr>,
}

impl DifferentialForm {
    pub fn new(degree: usize, coeffs: Vec<Expr>) -> Result<Self, FormError> {
        if degree > 3 {
            return Err(FormError::BadDegree(degree));
        }
        let expected = basis(degree).len();
        if coeffs.len() != expected {
            return Err(FormError::CoefficientCount {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(DifferentialForm { degree, coeffs })
    }

    pub fn zero(degree: usize) -> Self {
        DifferentialForm {
            degree,
            coeffs: vec![Expr::zero(); basis(degree).len()],
        }
    }

    pub fn function(f: Expr) -> Self {
        DifferentialForm {
            degree: 0,
            coeffs: vec![f],
        }
    }

    pub fn one_form(a: Expr, b: Expr, c: Expr) -> Self {
        DifferentialForm {
            degree: 1,
            coeffs: vec![a, b, c],
        }
    }

    /// `c[0] dy^dz + c[1] dz^dx + c[2] dx^dy`, the flux form of a vector field.
    pub fn two_form_from_flux(c: [Expr; 3]) -> Self {
        let [a, b, cz] = c;
        DifferentialForm {
            degree: 2,
            coeffs: vec![cz, Expr::neg(b), a],
        }
    }

    pub fn volume(c: Expr) -> Self {
        DifferentialForm {
            degree: 3,
            coeffs: vec![c],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficients(&self) -> &[Expr] {
        &self.coeffs
    }

    /// Coefficient of the basis element given by sorted axis indices,
    /// e.g. `&[0, 1]` for `dx^dy`.
    pub fn coefficient(&self, axes: &[usize]) -> Option<&Expr> {
        let mask = axes.iter().fold(0u8, |m, &a| m | (1 << a));
        if axes.len() != self.degree {
            return None;
        }
        basis(self.degree)
            .iter()
            .position(|&b| b == mask)
            .map(|i| &self.coeffs[i])
    }

    pub fn add(&self, other: &Self) -> Result<Self, FormError> {
        if self.degree != other.degree {
            return Err(FormError::WrongDegree {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(DifferentialForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| Expr::add(a.clone(), b.clone()))
                .collect(),
        })
    }

    pub fn scale(&self, f: &Expr) -> Self {
        DifferentialForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| Expr::mul(f.clone(), c.clone())).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().cloned().map(Expr::neg).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self, FormError> {
        let degree = self.degree + other.degree;
        if degree > 3 {
            return Err(FormError::DegreeOverflow(self.degree, other.degree));
        }
        let target = basis(degree);
        let mut out = vec![Expr::zero(); target.len()];
        for (i, &ma) in basis(self.degree).iter().enumerate() {
            for (j, &mb) in basis(other.degree).iter().enumerate() {
                if ma & mb != 0 {
                    continue;
                }
                let k = target.iter().position(|&t| t == ma | mb).expect("basis element");
                let term = Expr::mul(
                    Expr::num(merge_sign(ma, mb)),
                    Expr::mul(self.coeffs[i].clone(), other.coeffs[j].clone()),
                );
                out[k] = Expr::add(out[k].clone(), term);
            }
        }
        Ok(DifferentialForm { degree, coeffs: out })
    }

    pub fn exterior_derivative(&self) -> Result<Self, FormError> {
        if self.degree >= 3 {
            return Err(FormError::TopDegree);
        }
        let degree = self.degree + 1;
        let target = basis(degree);
        let mut out = vec![Expr::zero(); target.len()];
        for (i, &m) in basis(self.degree).iter().enumerate() {
            for (axis, var) in Var::SPACE.iter().enumerate() {
                let dm = 1u8 << axis;
                if m & dm != 0 {
                    continue;
                }
                let partial = self.coeffs[i].diff(*var);
                if partial.is_zero() {
                    continue;
                }
                let k = target.iter().position(|&t| t == m | dm).expect("basis element");
                let term = Expr::mul(Expr::num(merge_sign(dm, m)), partial);
                out[k] = Expr::add(out[k].clone(), term);
            }
        }
        Ok(DifferentialForm { degree, coeffs: out })
    }

    /// Contraction with a vector field `v = (v0, v1, v2)`.
    pub fn interior(&self, v: &[Expr; 3]) -> Result<Self, FormError> {
        if self.degree == 0 {
            return Ok(DifferentialForm::zero(0));
        }
        let degree = self.degree - 1;
        let target = basis(degree);
        let mut out = vec![Expr::zero(); target.len()];
        for (i, &m) in basis(self.degree).iter().enumerate() {
            // i_v(dx_a ^ rest) = v_a rest - dx_a ^ i_v(rest); walk the sorted axes
            let axes: Vec<usize> = (0..3).filter(|a| m & (1 << a) != 0).collect();
            for (pos, &a) in axes.iter().enumerate() {
                let rest = m & !(1 << a);
                let k = target.iter().position(|&t| t == rest).expect("basis element");
                let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
                let term = Expr::mul(
                    Expr::num(sign),
                    Expr::mul(v[a].clone(), self.coeffs[i].clone()),
                );
                out[k] = Expr::add(out[k].clone(), term);
            }
        }
        Ok(DifferentialForm { degree, coeffs: out })
    }

    pub fn eval(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        self.coeffs.iter().map(|c| c.try_eval(p)).collect()
    }

    /// Numerical equality at deterministic pseudo-random points of `[-2,2]^3`.
    pub fn approx_eq(&self, other: &Self, samples: usize, tol: f64) -> bool {
        if self.degree != other.degree {
            return false;
        }
        let mut state = 0x9E37_79B9_7F4A_7C15u64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..samples {
            let p = crate::expr::point_xyz(next(), next(), next());
            for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
                let (x, y) = (a.eval(&p), b.eval(&p));
                if !(x - y).abs().le(&(tol * (1.0 + x.abs().max(y.abs())))) {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, &m) in self.coeffs.iter().zip(basis(self.degree)) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if self.degree == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{}", basis_name(m))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parses `E1*dx + E2*dy + E3*dz` (any subset of the terms, any order).
pub fn parse_one_form(text: &str) -> Result<DifferentialForm, FormError> {
    match parse_with_differentials(text)? {
        Parsed::Form([a, b, c]) => Ok(DifferentialForm::one_form(a, b, c)),
        Parsed::Scalar(e) if e.is_zero() => Ok(DifferentialForm::zero(1)),
        Parsed::Scalar(_) => Err(FormError::WrongDegree {
            expected: 1,
            found: 0,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_expression, point_xyz};

    fn form(s: &str) -> DifferentialForm {
        parse_one_form(s).unwrap()
    }

    fn values(f: &DifferentialForm, p: Point) -> Vec<f64> {
        f.eval(&p).unwrap()
    }

    #[test]
    fn standard_form_coefficients() {
        let a = form("dz + x*dy");
        assert_eq!(values(&a, point_xyz(3.0, 1.0, 1.0)), vec![0.0, 3.0, 1.0]);
    }

    #[test]
    fn derivative_of_standard_form_is_dx_dy() {
        let da = form("dz + x*dy").exterior_derivative().unwrap();
        assert_eq!(da.degree(), 2);
        assert_eq!(values(&da, point_xyz(0.4, 0.1, -2.0)), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn constant_forms_are_closed() {
        let d = form("2*dx - 3*dy + pi*dz").exterior_derivative().unwrap();
        assert!(d.coefficients().iter().all(Expr::is_zero));
    }

    #[test]
    fn rotation_form_derivative() {
        // d(x dy - y dx) = 2 dx^dy
        let d = form("x*dy - y*dx").exterior_derivative().unwrap();
        assert_eq!(values(&d, point_xyz(1.0, 2.0, 3.0)), vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn wedge_examples() {
        let a = form("dz + x*dy");
        let vol = a.wedge(&a.exterior_derivative().unwrap()).unwrap();
        assert_eq!(values(&vol, point_xyz(5.0, -1.0, 2.0)), vec![1.0]);
        let aa = a.wedge(&a).unwrap();
        assert!(aa.approx_eq(&DifferentialForm::zero(2), 50, 1e-12));
        let a2 = form("dz + x*dy - y*dx");
        let vol2 = a2.wedge(&a2.exterior_derivative().unwrap()).unwrap();
        assert_eq!(values(&vol2, point_xyz(0.7, 0.2, 0.0)), vec![2.0]);
    }

    #[test]
    fn degree_errors() {
        let v = DifferentialForm::volume(Expr::one());
        assert_eq!(v.exterior_derivative().unwrap_err(), FormError::TopDegree);
        let a = form("dx");
        let b = a.exterior_derivative().unwrap().wedge(&a).unwrap();
        assert_eq!(b.degree(), 3);
        assert!(matches!(b.wedge(&a), Err(FormError::DegreeOverflow(3, 1))));
        assert!(parse_one_form("x").is_err());
        assert_eq!(parse_one_form("0").unwrap().degree(), 1);
    }

    #[test]
    fn interior_product_of_volume() {
        let vol = DifferentialForm::volume(Expr::one());
        let v = [Expr::one(), Expr::zero(), Expr::zero()];
        // i_{d/dx} dx^dy^dz = dy^dz
        let i = vol.interior(&v).unwrap();
        assert_eq!(values(&i, point_xyz(0.0, 0.0, 0.0)), vec![0.0, 0.0, 1.0]);
        let dxdy = form("x*dy").exterior_derivative().unwrap();
        let j = dxdy.interior(&[Expr::zero(), Expr::one(), Expr::zero()]).unwrap();
        // i_{d/dy} dx^dy = -dx
        assert_eq!(values(&j, point_xyz(0.0, 0.0, 0.0)), vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn flux_two_form_layout() {
        let w = DifferentialForm::two_form_from_flux([
            parse_expression("1").unwrap(),
            parse_expression("2").unwrap(),
            parse_expression("3").unwrap(),
        ]);
        // dx^dx stays out, dz^dx = -dx^dz
        assert_eq!(values(&w, point_xyz(0.0, 0.0, 0.0)), vec![3.0, -2.0, 1.0]);
    }
}
