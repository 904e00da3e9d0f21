use crate::contact::ContactForm;
use crate::expr::{point_uv, Compiled, Expr, Var};

use super::surface::{cross, dot, Surface};
use super::FoliationError;

/// `beta = sigma^* alpha = beta1 du + beta2 dv` with directing field
/// `W = (beta2, -beta1)`, so that `i_W (du ^ dv) = beta`.
#[derive(Clone, Debug)]
pub struct PulledBackForm {
    beta: [Expr; 2],
    w: [Expr; 2],
    flipped: bool,
    cw: [Compiled; 2],
    cjac: [[Compiled; 2]; 2],
    cdiv: Compiled,
    cdiv_grad: [Compiled; 2],
    covector: Option<[Compiled; 3]>,
}

impl PulledBackForm {
    /// Builds the form from chart coefficients directly, with no ambient data.
    pub fn from_beta(beta1: Expr, beta2: Expr) -> Self {
        Self::build([beta1, beta2], None, false)
    }

    fn build(beta: [Expr; 2], covector: Option<[Expr; 3]>, flipped: bool) -> Self {
        let sign = if flipped { -1.0 } else { 1.0 };
        let w = [
            Expr::mul(Expr::num(sign), beta[1].clone()),
            Expr::mul(Expr::num(-sign), beta[0].clone()),
        ];
        let jac = w.clone().map(|c| [c.diff(Var::U), c.diff(Var::V)]);
        let div = Expr::add(jac[0][0].clone(), jac[1][1].clone());
        let div_grad = [div.diff(Var::U), div.diff(Var::V)];
        PulledBackForm {
            cw: w.each_ref().map(Expr::compile),
            cjac: jac.each_ref().map(|r| r.each_ref().map(Expr::compile)),
            cdiv: div.compile(),
            cdiv_grad: div_grad.each_ref().map(Expr::compile),
            covector: covector.map(|c| c.each_ref().map(Expr::compile)),
            beta,
            w,
            flipped,
        }
    }

    pub fn beta(&self) -> &[Expr; 2] {
        &self.beta
    }

    pub fn directing_field(&self) -> &[Expr; 2] {
        &self.w
    }

    /// Whether the orientation probe reversed `(beta2, -beta1)`.
    pub fn flipped(&self) -> bool {
        self.flipped
    }

    pub fn w_at(&self, q: [f64; 2]) -> [f64; 2] {
        let p = point_uv(q[0], q[1]);
        [self.cw[0].eval_lenient(&p), self.cw[1].eval_lenient(&p)]
    }

    /// `[[dW1/du, dW1/dv], [dW2/du, dW2/dv]]`.
    pub fn jacobian_at(&self, q: [f64; 2]) -> [[f64; 2]; 2] {
        let p = point_uv(q[0], q[1]);
        self.cjac.each_ref().map(|r| r.each_ref().map(|c| c.eval_lenient(&p)))
    }

    /// `div W` with respect to `du ^ dv`.
    pub fn div_at(&self, q: [f64; 2]) -> f64 {
        self.cdiv.eval_lenient(&point_uv(q[0], q[1]))
    }

    pub fn div_grad_at(&self, q: [f64; 2]) -> [f64; 2] {
        let p = point_uv(q[0], q[1]);
        [self.cdiv_grad[0].eval_lenient(&p), self.cdiv_grad[1].eval_lenient(&p)]
    }

    /// Covector of alpha at `sigma(q)`, when built from an ambient form.
    pub fn covector_at(&self, q: [f64; 2]) -> Option<[f64; 3]> {
        let p = point_uv(q[0], q[1]);
        self.covector.as_ref().map(|c| c.each_ref().map(|e| e.eval_lenient(&p)))
    }
}

/// Pulls alpha back along the chart and fixes the leaf orientation.
pub fn pullback(alpha: &ContactForm, surface: &Surface) -> Result<PulledBackForm, FoliationError> {
    surface.validate(Some(alpha.domain()), 32)?;
    let subs = {
        let [x, y, z] = surface.sigma().clone();
        [Some(x), Some(y), Some(z), None, None, None]
    };
    let a: [Expr; 3] = [0, 1, 2].map(|i| alpha.alpha().coefficients()[i].substitute(&subs));
    let beta = [Var::U, Var::V].map(|w| {
        let mut acc = Expr::zero();
        for (i, ai) in a.iter().enumerate() {
            acc = Expr::add(acc, Expr::mul(ai.clone(), surface.sigma()[i].diff(w)));
        }
        acc
    });
    let pb = PulledBackForm::build(beta.clone(), Some(a.clone()), false);
    if orientation_probe(&pb, surface) < 0.0 {
        return Ok(PulledBackForm::build(beta, Some(a), true));
    }
    Ok(pb)
}

/// `det(v, A x v, nu x v)` at the chart point with the largest `|W|` on a
/// coarse grid, where `v = sigma_* W`. Positive when `W` orients the leaves.
fn orientation_probe(pb: &PulledBackForm, surface: &Surface) -> f64 {
    let mut best = (0.0, [0.5, 0.5]);
    for i in 0..16 {
        for j in 0..16 {
            let q = [(i as f64 + 0.5) / 16.0, (j as f64 + 0.5) / 16.0];
            let w = pb.w_at(q);
            let m = w[0].hypot(w[1]);
            if m.is_finite() && m > best.0 {
                best = (m, q);
            }
        }
    }
    let q = best.1;
    let w = pb.w_at(q);
    let [su, sv] = surface.partials(q[0], q[1]);
    let v = [0, 1, 2].map(|i| w[0] * su[i] + w[1] * sv[i]);
    let a = pb.covector_at(q).unwrap_or([0.0; 3]);
    let nu = cross(su, sv);
    dot(v, cross(cross(a, v), cross(nu, v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{rotational_alpha, standard_alpha, ContactForm, Domain};
    use crate::foliation::surface::examples::*;
    use crate::foliation::surface::Topology;

    fn plane(sigma: [&str; 3]) -> Surface {
        Surface::new(sigma.map(|s| s.parse().unwrap()), [false, false], Topology::Disk, vec![]).unwrap()
    }

    fn std_form() -> ContactForm {
        ContactForm::assume(standard_alpha(), Domain::cube(-2.0, 2.0)).unwrap()
    }

    #[test]
    fn xy_plane_gives_u_dv() {
        let pb = pullback(&std_form(), &plane(["u", "v", "0"])).unwrap();
        for q in [[0.3, 0.9], [0.7, 0.1]] {
            let w = pb.w_at(q);
            assert_eq!(w, [q[0], 0.0]);
        }
        assert!(!pb.flipped());
    }

    #[test]
    fn yz_plane_gives_dv() {
        let pb = pullback(&std_form(), &plane(["0", "u", "v"])).unwrap();
        assert_eq!(pb.w_at([0.2, 0.4]), [1.0, 0.0]);
        assert_eq!(pb.div_at([0.2, 0.4]), 0.0);
    }

    #[test]
    fn beta_annihilates_w() {
        let c = ContactForm::assume(rotational_alpha(), Domain::cube(-2.0, 2.0)).unwrap();
        let pb = pullback(&c, &sphere()).unwrap();
        let [b1, b2] = pb.beta().clone();
        let [w1, w2] = pb.directing_field().clone();
        let contraction = Expr::add(Expr::mul(b1, w1), Expr::mul(b2, w2));
        for q in [[0.1, 0.2], [0.5, 0.77], [0.93, 0.4]] {
            assert!(contraction.eval(&point_uv(q[0], q[1])).abs() < 1e-14);
        }
        // zeros only at the poles
        for i in 1..20 {
            for j in 0..20 {
                let w = pb.w_at([i as f64 / 20.0, j as f64 / 20.0]);
                assert!(w[0].hypot(w[1]) > 1e-3);
            }
        }
    }

    #[test]
    fn torus_directing_field() {
        let c = ContactForm::assume(standard_alpha(), Domain::quotient(-2.0, 2.0, 1.0, 1.0)).unwrap();
        let pb = pullback(&c, &torus_sine()).unwrap();
        let q = [0.3, 0.1];
        let w = pb.w_at(q);
        assert_eq!(w[0], 1.0);
        assert!((w[1] + (0.2 * std::f64::consts::PI).sin()).abs() < 1e-15);
        let h = pb.div_at(q);
        assert!((h + 2.0 * std::f64::consts::PI * (0.2 * std::f64::consts::PI).cos()).abs() < 1e-12);
    }
}
