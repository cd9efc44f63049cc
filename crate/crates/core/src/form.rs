//! Differential forms on the plane and the exterior calculus used by the
//! division algorithms.

use std::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::weights::WeightSystem;

/// A 0-, 1- or 2-form with polynomial coefficients.
///
/// The 2-form basis is `dx∧dy`; a 1-form is `P dx + Q dy`.
#[derive(Clone, Debug, PartialEq)]
pub enum DifferentialForm<K> {
    Function(Polynomial<K>),
    OneForm { dx: Polynomial<K>, dy: Polynomial<K> },
    TwoForm(Polynomial<K>),
}

use DifferentialForm::*;

impl<K: Scalar> DifferentialForm<K> {
    pub fn one_form(dx: Polynomial<K>, dy: Polynomial<K>) -> Self {
        OneForm { dx, dy }
    }

    pub fn two_form(coeff: Polynomial<K>) -> Self {
        TwoForm(coeff)
    }

    pub fn zero(degree: u8) -> Self {
        match degree {
            0 => Function(Polynomial::zero()),
            1 => OneForm {
                dx: Polynomial::zero(),
                dy: Polynomial::zero(),
            },
            _ => TwoForm(Polynomial::zero()),
        }
    }

    pub fn degree(&self) -> u8 {
        match self {
            Function(_) => 0,
            OneForm { .. } => 1,
            TwoForm(_) => 2,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Function(p) | TwoForm(p) => p.is_zero(),
            OneForm { dx, dy } => dx.is_zero() && dy.is_zero(),
        }
    }

    /// Coefficient of a 0- or 2-form.
    pub fn coefficient(&self) -> Result<&Polynomial<K>> {
        match self {
            Function(p) | TwoForm(p) => Ok(p),
            OneForm { .. } => Err(Error::WrongDegree {
                expected: 2,
                got: 1,
            }),
        }
    }

    /// `(P, Q)` of a 1-form.
    pub fn components(&self) -> Result<(&Polynomial<K>, &Polynomial<K>)> {
        match self {
            OneForm { dx, dy } => Ok((dx, dy)),
            other => Err(Error::WrongDegree {
                expected: 1,
                got: other.degree(),
            }),
        }
    }

    pub fn expect_degree(&self, degree: u8) -> Result<()> {
        if self.degree() == degree {
            Ok(())
        } else {
            Err(Error::WrongDegree {
                expected: degree,
                got: self.degree(),
            })
        }
    }

    pub fn map(&self, f: impl Fn(&Polynomial<K>) -> Polynomial<K>) -> Self {
        match self {
            Function(p) => Function(f(p)),
            OneForm { dx, dy } => OneForm { dx: f(dx), dy: f(dy) },
            TwoForm(p) => TwoForm(f(p)),
        }
    }

    pub fn scale(&self, c: &K) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Multiplication by a function.
    pub fn mul_fn(&self, g: &Polynomial<K>) -> Self {
        self.map(|p| p * g)
    }

    pub fn truncate(&self, w: &WeightSystem, cap: i64) -> Self {
        self.map(|p| p.truncate(w, cap))
    }

    /// `d`, raising degree by one.
    pub fn exterior_derivative(&self) -> Result<Self> {
        match self {
            Function(g) => Ok(OneForm {
                dx: g.dx(),
                dy: g.dy(),
            }),
            OneForm { dx, dy } => Ok(TwoForm(&dy.dx() - &dx.dy())),
            TwoForm(_) => Err(Error::TopDegree),
        }
    }

    /// `E⌟form` for the Euler field `E = m1 x ∂x + m2 y ∂y`.
    pub fn interior_euler(&self, w: &WeightSystem) -> Result<Self> {
        let m1 = K::from_rational(w.m1());
        let m2 = K::from_rational(w.m2());
        match self {
            Function(_) => Err(Error::ZeroDegree),
            OneForm { dx, dy } => Ok(Function(
                &dx.mul_monomial(1, 0).scale(&m1) + &dy.mul_monomial(0, 1).scale(&m2),
            )),
            TwoForm(g) => Ok(OneForm {
                dx: -&g.mul_monomial(0, 1).scale(&m2),
                dy: g.mul_monomial(1, 0).scale(&m1),
            }),
        }
    }

    /// Membership in `xΩ^i_H`: forms vanishing on `H = {x = 0}` together with
    /// their pullback. Functions in `(x^2)`; 1-forms with `P ∈ (x)`,
    /// `Q ∈ (x^2)`; 2-forms with coefficient in `(x)`.
    pub fn vanishes_on_boundary(&self) -> bool {
        match self {
            Function(g) => g.in_x_ideal(2),
            OneForm { dx, dy } => dx.in_x_ideal(1) && dy.in_x_ideal(2),
            TwoForm(g) => g.in_x_ideal(1),
        }
    }
}

/// `df∧eta = (f_x Q − f_y P) dx∧dy` for `eta = P dx + Q dy`.
pub fn wedge_df<K: Scalar>(f: &Polynomial<K>, eta: &DifferentialForm<K>) -> Result<DifferentialForm<K>> {
    let (p, q) = eta.components()?;
    Ok(TwoForm(&(&f.dx() * q) - &(&f.dy() * p)))
}

/// `df∧dg` as a polynomial coefficient.
pub fn wedge_df_dg<K: Scalar>(f: &Polynomial<K>, g: &Polynomial<K>) -> Polynomial<K> {
    &(&f.dx() * &g.dy()) - &(&f.dy() * &g.dx())
}

fn zip_forms<K: Scalar>(
    a: &DifferentialForm<K>,
    b: &DifferentialForm<K>,
    op: impl Fn(&Polynomial<K>, &Polynomial<K>) -> Polynomial<K>,
) -> DifferentialForm<K> {
    match (a, b) {
        (Function(p), Function(q)) => Function(op(p, q)),
        (TwoForm(p), TwoForm(q)) => TwoForm(op(p, q)),
        (OneForm { dx: p1, dy: q1 }, OneForm { dx: p2, dy: q2 }) => OneForm {
            dx: op(p1, p2),
            dy: op(q1, q2),
        },
        _ => panic!("adding forms of degree {} and {}", a.degree(), b.degree()),
    }
}

impl<K: Scalar> Add for &DifferentialForm<K> {
    type Output = DifferentialForm<K>;

    /// # Panics
    /// On mismatched degrees.
    fn add(self, rhs: Self) -> DifferentialForm<K> {
        zip_forms(self, rhs, |a, b| a + b)
    }
}

impl<K: Scalar> Sub for &DifferentialForm<K> {
    type Output = DifferentialForm<K>;

    fn sub(self, rhs: Self) -> DifferentialForm<K> {
        zip_forms(self, rhs, |a, b| a - b)
    }
}
