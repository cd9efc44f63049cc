//! Iterative decomposition of 2-forms over the ring of functions of `f`.
//!
//! A 2-form `ω ∈ xΩ²` is written as
//! `ω = x Σ c_i(f) e_i dx∧dy + df∧dξ` with `ξ ∈ (x²)`, one power of `f` per
//! pass: reduce the working coefficient modulo `(x f_x, f_y)`, absorb the
//! ideal part through the division lemma `df∧η = fθ + df∧dh`, and recurse
//! on `θ`.

use crate::error::{Error, Result};
use crate::form::{wedge_df, wedge_df_dg, DifferentialForm};
use crate::local::{graded_reduce, milnor_ordinary, BoundaryGerm, GradedIdeal};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::Scalar;
use crate::series::Series;
use crate::weights::WeightSystem;

pub const DEFAULT_MAX_ORDER: usize = 32;

/// `θ` with `L_E θ = rhs`, where `E` is the Euler field of `w`.
///
/// On `x^i y^j dx∧dy` the Lie derivative acts by `m1 i + m2 j + m1 + m2`.
pub fn euler_invert<K: Scalar>(w: &WeightSystem, rhs: &DifferentialForm<K>) -> Result<DifferentialForm<K>> {
    let g = match rhs {
        DifferentialForm::TwoForm(g) => g,
        other => {
            return Err(Error::WrongDegree {
                expected: 2,
                got: other.degree(),
            })
        }
    };
    let total = w.total();
    let out = Polynomial::from_terms(g.terms().map(|(m, c)| {
        let eigen = w.m1() * crate::scalar::int(m.ex as i64) + w.m2() * crate::scalar::int(m.ey as i64) + &total;
        (*m, c.clone() / K::from_rational(&eigen))
    }));
    Ok(DifferentialForm::TwoForm(out))
}

/// `h` with `dh = pi` and `h(0, 0) = 0`.
///
/// Monomial rule: `x^i y^j dx ↦ x^{i+1} y^j / (i+j+1)` and
/// `x^i y^j dy ↦ x^i y^{j+1} / (i+j+1)`. With `require_boundary` the input
/// must lie in `xΩ¹_H` and the output then lies in `(x²)`.
pub fn homotopy_potential<K: Scalar>(pi: &DifferentialForm<K>, require_boundary: bool) -> Result<Polynomial<K>> {
    let (p, q) = pi.components()?;
    if !pi.exterior_derivative()?.is_zero() {
        return Err(Error::NotClosed);
    }
    if require_boundary && !pi.vanishes_on_boundary() {
        return Err(Error::Boundary("1-form is not in xΩ¹_H".into()));
    }
    let mut h = Polynomial::zero();
    for (m, c) in p.terms() {
        let div = K::from_i64((m.ex + m.ey + 1) as i64);
        h.add_term(Monomial::new(m.ex + 1, m.ey), c.clone() / div);
    }
    for (m, c) in q.terms() {
        let div = K::from_i64((m.ex + m.ey + 1) as i64);
        h.add_term(Monomial::new(m.ex, m.ey + 1), c.clone() / div);
    }
    if require_boundary && !h.in_x_ideal(2) {
        return Err(Error::InvariantViolation("potential escaped (x²)".into()));
    }
    Ok(h)
}

/// Division lemma: `df∧η = f θ + df∧dh`, with `θ = L_E⁻¹ dη` and
/// `h = H(η − E⌟θ)`. The identity is checked before returning.
pub fn divide_by_df<K: Scalar>(germ: &BoundaryGerm<K>, eta: &DifferentialForm<K>) -> Result<(DifferentialForm<K>, Polynomial<K>)> {
    eta.expect_degree(1)?;
    if !eta.vanishes_on_boundary() {
        return Err(Error::Boundary("1-form is not in xΩ¹_H".into()));
    }
    divide(&germ.f, &germ.weights, eta, true)
}

fn divide<K: Scalar>(
    f: &Polynomial<K>,
    w: &WeightSystem,
    eta: &DifferentialForm<K>,
    boundary: bool,
) -> Result<(DifferentialForm<K>, Polynomial<K>)> {
    let theta = euler_invert(w, &eta.exterior_derivative()?)?;
    let pi = eta - &theta.interior_euler(w)?;
    let h = homotopy_potential(&pi, boundary)?;
    let lhs = wedge_df(f, eta)?;
    let rhs = &theta.mul_fn(f) + &DifferentialForm::TwoForm(wedge_df_dg(f, &h));
    if lhs != rhs {
        return Err(Error::InvariantViolation("division identity df∧η = fθ + df∧dh failed".into()));
    }
    Ok((theta, h))
}

/// `ω = x^b Σ c_i(f) e_i dx∧dy + df∧dξ + f^iterations · residual`, where
/// `b = 1` for the boundary quotient and `b = 0` for the ordinary one.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionResult<K> {
    pub f: Polynomial<K>,
    pub weights: WeightSystem,
    pub basis: Vec<Monomial>,
    /// Whether the quotient is by `(x f_x, f_y)` rather than `(f_x, f_y)`.
    pub boundary: bool,
    pub c: Vec<Series<K>>,
    pub xi: Polynomial<K>,
    pub residual: DifferentialForm<K>,
    pub iterations: usize,
}

impl<K: Scalar> DecompositionResult<K> {
    pub fn mu(&self) -> usize {
        self.basis.len()
    }

    pub fn converged(&self) -> bool {
        self.residual.is_zero()
    }

    /// `x^b Σ c_i(f) e_i` as an exact polynomial.
    pub fn normal_part(&self) -> Polynomial<K> {
        let mut out = Polynomial::zero();
        for (e, c) in self.basis.iter().zip(&self.c) {
            let term = c.compose_poly_exact(&self.f).mul_monomial(e.ex, e.ey);
            out = &out + &term;
        }
        if self.boundary {
            out.mul_monomial(1, 0)
        } else {
            out
        }
    }
}

/// Reduction data of one quotient.
trait Quotient<K: Scalar> {
    /// `g = Σ c_i e_i + (η-part)` with `df∧η = g − Σ c_i e_i` (times the
    /// boundary factor `x` when present).
    fn split(&self, g: &Polynomial<K>) -> (Vec<K>, DifferentialForm<K>);
}

struct BoundaryQuotient<'a, K>(&'a BoundaryGerm<K>);

impl<K: Scalar> Quotient<K> for BoundaryQuotient<'_, K> {
    fn split(&self, g: &Polynomial<K>) -> (Vec<K>, DifferentialForm<K>) {
        let cert = graded_reduce(g, self.0);
        // df∧(−q dx + x p dy) = p·x f_x + q·f_y; one more x lands in xΩ¹_H.
        let eta = DifferentialForm::one_form(-&cert.q.mul_monomial(1, 0), cert.p.mul_monomial(2, 0));
        (cert.c, eta)
    }
}

struct OrdinaryQuotient<'a, K> {
    ideal: &'a GradedIdeal<K>,
    fx: Polynomial<K>,
    fy: Polynomial<K>,
}

impl<K: Scalar> Quotient<K> for OrdinaryQuotient<'_, K> {
    fn split(&self, g: &Polynomial<K>) -> (Vec<K>, DifferentialForm<K>) {
        let (c, cof) = self.ideal.reduce(g);
        let mut p = Polynomial::zero();
        let mut q = Polynomial::zero();
        // Zero generators were dropped by the ideal, so match by position of the survivors.
        let mut it = cof.into_iter();
        if !self.fx.is_zero() {
            p = it.next().unwrap_or_default();
        }
        if !self.fy.is_zero() {
            q = it.next().unwrap_or_default();
        }
        (c, DifferentialForm::one_form(-&q, p))
    }
}

fn run<K: Scalar>(
    omega: &DifferentialForm<K>,
    f: &Polynomial<K>,
    w: &WeightSystem,
    basis: &[Monomial],
    boundary: bool,
    quotient: &dyn Quotient<K>,
    max_order: usize,
) -> Result<DecompositionResult<K>> {
    let coeff = omega.coefficient()?;
    omega.expect_degree(2)?;
    let mut working = if boundary {
        if !coeff.in_x_ideal(1) {
            return Err(Error::NotInXOmega2);
        }
        coeff.div_x_pow(1)
    } else {
        coeff.clone()
    };
    let order = max_order.max(1);
    let mut c: Vec<Vec<K>> = vec![vec![K::zero(); order]; basis.len()];
    let mut xi = Polynomial::zero();
    let mut f_pow = Polynomial::one();
    let mut iterations = 0;
    while !working.is_zero() && iterations < max_order {
        let (cp, eta) = quotient.split(&working);
        for (series, v) in c.iter_mut().zip(cp) {
            series[iterations] = v;
        }
        let (theta, h) = divide(f, w, &eta, boundary)?;
        xi = &xi + &(&f_pow * &h);
        f_pow = &f_pow * f;
        let t = theta.coefficient()?;
        working = if boundary { t.div_x_pow(1) } else { t.clone() };
        iterations += 1;
    }
    let residual = if boundary {
        working.mul_monomial(1, 0)
    } else {
        working
    };
    let keep = iterations.max(1);
    let result = DecompositionResult {
        f: f.clone(),
        weights: w.clone(),
        basis: basis.to_vec(),
        boundary,
        c: c.into_iter().map(|mut s| {
            s.truncate(keep);
            Series::new(s)
        }).collect(),
        xi,
        residual: DifferentialForm::TwoForm(residual),
        iterations,
    };
    if !verify_certificate(&result, omega, f) {
        return Err(Error::InvariantViolation("decomposition certificate failed".into()));
    }
    Ok(result)
}

/// Decomposition relative to the boundary `{x = 0}`.
pub fn decompose<K: Scalar>(omega: &DifferentialForm<K>, germ: &BoundaryGerm<K>, max_order: usize) -> Result<DecompositionResult<K>> {
    run(
        omega,
        &germ.f,
        &germ.weights,
        &germ.basis,
        true,
        &BoundaryQuotient(germ),
        max_order,
    )
}

/// Decomposition without boundary, modulo `df∧dΩ⁰`.
pub fn decompose_ordinary<K: Scalar>(
    omega: &DifferentialForm<K>,
    f: &Polynomial<K>,
    w: &WeightSystem,
    max_order: usize,
) -> Result<DecompositionResult<K>> {
    let ideal = milnor_ordinary(f, w, w.default_cap())?;
    let quotient = OrdinaryQuotient {
        ideal: &ideal,
        fx: f.dx(),
        fy: f.dy(),
    };
    run(omega, f, w, ideal.basis(), false, &quotient, max_order)
}

/// Whether the certificate identity holds exactly.
pub fn verify_certificate<K: Scalar>(result: &DecompositionResult<K>, omega: &DifferentialForm<K>, f: &Polynomial<K>) -> bool {
    let Ok(coeff) = omega.coefficient() else {
        return false;
    };
    let Ok(res) = result.residual.coefficient() else {
        return false;
    };
    if omega.degree() != 2 || *f != result.f {
        return false;
    }
    let rebuilt = &(&result.normal_part() + &wedge_df_dg(f, &result.xi)) + &(&f.pow(result.iterations as u32) * res);
    rebuilt == *coeff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::{detect_weights, milnor_boundary};
    use crate::scalar::{int, rat, Rational};

    type P = Polynomial<Rational>;
    type F = DifferentialForm<Rational>;
    type S = Series<Rational>;

    fn a1() -> BoundaryGerm<Rational> {
        let f = P::from_ints(&[(1, 1, 0), (1, 0, 2)]);
        milnor_boundary(&f, &WeightSystem::a1(), 20).unwrap()
    }

    #[test]
    fn euler_inverse_examples() {
        let w = WeightSystem::a1();
        assert!(euler_invert(&w, &F::zero(2)).unwrap().is_zero());
        assert_eq!(
            euler_invert(&w, &F::two_form(P::from_ints(&[(2, 1, 1)]))).unwrap(),
            F::two_form(P::term(rat(2, 3), 1, 1))
        );
        assert_eq!(
            euler_invert(&w, &F::two_form(P::x())).unwrap(),
            F::two_form(P::term(rat(2, 5), 1, 0))
        );
    }

    #[test]
    fn homotopy_examples() {
        let pi = F::one_form(P::x(), P::zero());
        assert_eq!(homotopy_potential(&pi, false).unwrap(), P::term(rat(1, 2), 2, 0));
        let pi = F::one_form(P::from_ints(&[(2, 1, 1)]), P::from_ints(&[(1, 2, 0)]));
        assert_eq!(homotopy_potential(&pi, true).unwrap(), P::from_ints(&[(1, 2, 1)]));
        let pi = F::one_form(P::term(rat(-1, 2), 1, 0), P::zero());
        assert_eq!(homotopy_potential(&pi, true).unwrap(), P::term(rat(-1, 4), 2, 0));
        let open = F::one_form(P::y(), P::zero());
        assert_eq!(homotopy_potential(&open, false), Err(Error::NotClosed));
    }

    #[test]
    fn division_examples() {
        let g = a1();
        let (theta, h) = divide_by_df(&g, &F::one_form(P::term(rat(-1, 2), 1, 0), P::zero())).unwrap();
        assert!(theta.is_zero());
        assert_eq!(h, P::term(rat(-1, 4), 2, 0));

        let (theta, h) = divide_by_df(&g, &F::one_form(P::zero(), P::from_ints(&[(1, 2, 1)]))).unwrap();
        assert_eq!(theta, F::two_form(P::term(rat(2, 3), 1, 1)));
        assert_eq!(h, P::term(rat(1, 6), 2, 2));

        let (theta, h) = divide_by_df(&g, &F::one_form(P::from_ints(&[(1, 2, 0)]), P::zero())).unwrap();
        assert!(theta.is_zero());
        assert_eq!(h, P::term(rat(1, 3), 3, 0));

        assert!(divide_by_df(&g, &F::one_form(P::zero(), P::x())).is_err());
    }

    #[test]
    fn decompose_examples() {
        let g = a1();
        let r = decompose(&F::two_form(P::x()), &g, 32).unwrap();
        assert_eq!(r.c, vec![S::from_ints(&[1])]);
        assert!(r.xi.is_zero() && r.converged());

        let r = decompose(&F::two_form(P::from_ints(&[(1, 1, 0), (1, 1, 1)])), &g, 32).unwrap();
        assert!(r.c[0].same_terms(&S::from_ints(&[1])));
        assert_eq!(r.xi, P::term(rat(-1, 4), 2, 0));

        let r = decompose(&F::two_form(P::from_ints(&[(1, 1, 0), (1, 2, 0), (1, 1, 2)])), &g, 32).unwrap();
        assert!(r.c[0].same_terms(&S::from_ints(&[1, 1])));
        assert!(r.xi.is_zero());

        assert_eq!(decompose(&F::two_form(P::y()), &g, 32), Err(Error::NotInXOmega2));
    }

    #[test]
    fn ordinary_examples() {
        let f = P::from_ints(&[(1, 2, 0), (1, 0, 2)]);
        let w = detect_weights(&f).unwrap();
        let r = decompose_ordinary(&F::two_form(P::one()), &f, &w, 32).unwrap();
        assert_eq!(r.c, vec![S::from_ints(&[1])]);
        assert!(r.xi.is_zero());

        let r = decompose_ordinary(&F::two_form(P::from_ints(&[(1, 0, 0), (1, 2, 0), (1, 0, 2)])), &f, &w, 32).unwrap();
        assert!(r.c[0].same_terms(&S::from_ints(&[1, 1])));
        assert!(r.xi.is_zero());

        let omega = F::two_form(P::from_ints(&[(1, 0, 0), (1, 1, 0)]));
        let r = decompose_ordinary(&omega, &f, &w, 32).unwrap();
        assert!(r.c[0].same_terms(&S::from_ints(&[1])));
        assert_eq!(wedge_df_dg(&f, &r.xi), P::x());
    }

    #[test]
    fn tampering_breaks_certificate() {
        let f4 = P::from_ints(&[(1, 2, 0), (1, 0, 3)]);
        let w = detect_weights(&f4).unwrap();
        let germ = milnor_boundary(&f4, &w, w.default_cap()).unwrap();
        let omega = F::two_form(P::from_ints(&[(1, 1, 0), (3, 2, 1), (-2, 1, 3), (1, 3, 2)]));
        let r = decompose(&omega, &germ, 32).unwrap();
        assert!(verify_certificate(&r, &omega, &f4));

        let mut bad = r.clone();
        bad.c[0] = bad.c[0].add(&S::one(bad.c[0].order()));
        assert!(!verify_certificate(&bad, &omega, &f4));

        let mut bad = r.clone();
        bad.xi.add_term(Monomial::new(3, 0), int(1));
        assert!(!verify_certificate(&bad, &omega, &f4));
    }
}
