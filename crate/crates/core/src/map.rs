//! Polynomial maps of the plane fixing the origin, truncated by quasidegree.

use crate::error::{Error, Result};
use crate::form::DifferentialForm;
use crate::poly::Polynomial;
use crate::scalar::Scalar;
use crate::weights::WeightSystem;

/// `(x, y) ↦ (fx(x, y), fy(x, y))`.
///
/// Components are kept relative to the grading: `fx` through level
/// `cap + level(x)` and `fy` through `cap + level(y)`. With that convention
/// pulling back a function or a 2-form coefficient is exact through `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneMap<K> {
    pub fx: Polynomial<K>,
    pub fy: Polynomial<K>,
    pub grading: WeightSystem,
    pub cap: i64,
}

impl<K: Scalar> PlaneMap<K> {
    pub fn new(fx: Polynomial<K>, fy: Polynomial<K>, grading: WeightSystem, cap: i64) -> Result<Self> {
        if cap < 0 {
            return Err(Error::NegativeCap(cap));
        }
        if !fx.constant_term().is_zero() || !fy.constant_term().is_zero() {
            return Err(Error::MapNotAtOrigin);
        }
        let map = PlaneMap {
            fx: fx.truncate(&grading, cap + grading.level_x()),
            fy: fy.truncate(&grading, cap + grading.level_y()),
            grading,
            cap,
        };
        if map.det_at_origin().is_zero() {
            return Err(Error::SingularLinearPart);
        }
        Ok(map)
    }

    pub fn identity(grading: WeightSystem, cap: i64) -> Self {
        PlaneMap {
            fx: Polynomial::x(),
            fy: Polynomial::y(),
            grading,
            cap,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.fx == Polynomial::x() && self.fy == Polynomial::y()
    }

    /// `[[∂x fx, ∂y fx], [∂x fy, ∂y fy]]` at the origin.
    pub fn linear_part(&self) -> [[K; 2]; 2] {
        [
            [self.fx.coeff(1, 0), self.fx.coeff(0, 1)],
            [self.fy.coeff(1, 0), self.fy.coeff(0, 1)],
        ]
    }

    pub fn det_at_origin(&self) -> K {
        let [[a, b], [c, d]] = self.linear_part();
        a * d - b * c
    }

    /// Maps `{x = 0}` into itself.
    pub fn is_boundary_preserving(&self) -> bool {
        self.fx.in_x_ideal(1)
    }

    /// Jacobian determinant, truncated at `cap`.
    pub fn jacobian(&self, cap: i64) -> Polynomial<K> {
        let w = &self.grading;
        &self.fx.dx().mul_truncated(&self.fy.dy(), w, cap)
            - &self.fx.dy().mul_truncated(&self.fy.dx(), w, cap)
    }

    pub fn pull_function(&self, g: &Polynomial<K>, cap: i64) -> Polynomial<K> {
        g.compose_truncated(&self.fx, &self.fy, &self.grading, cap)
    }

    /// `Φ*form`, coefficients truncated at `cap`.
    pub fn pullback(&self, form: &DifferentialForm<K>, cap: i64) -> Result<DifferentialForm<K>> {
        if cap < 0 {
            return Err(Error::NegativeCap(cap));
        }
        let w = &self.grading;
        Ok(match form {
            DifferentialForm::Function(g) => DifferentialForm::Function(self.pull_function(g, cap)),
            DifferentialForm::OneForm { dx, dy } => {
                let p = self.pull_function(dx, cap);
                let q = self.pull_function(dy, cap);
                let mul = |a: &Polynomial<K>, b: &Polynomial<K>| a.mul_truncated(b, w, cap);
                DifferentialForm::OneForm {
                    dx: &mul(&p, &self.fx.dx()) + &mul(&q, &self.fy.dx()),
                    dy: &mul(&p, &self.fx.dy()) + &mul(&q, &self.fy.dy()),
                }
            }
            DifferentialForm::TwoForm(g) => DifferentialForm::TwoForm(
                self.pull_function(g, cap)
                    .mul_truncated(&self.jacobian(cap), w, cap),
            ),
        })
    }

    /// `self ∘ inner`, so `(self ∘ inner)* = inner* ∘ self*`.
    pub fn compose(&self, inner: &PlaneMap<K>) -> PlaneMap<K> {
        let cap = self.cap.min(inner.cap);
        let w = &self.grading;
        PlaneMap {
            fx: self.fx.compose_truncated(&inner.fx, &inner.fy, w, cap + w.level_x()),
            fy: self.fy.compose_truncated(&inner.fx, &inner.fy, w, cap + w.level_y()),
            grading: w.clone(),
            cap,
        }
    }

    /// Same map under another grading and cap.
    pub fn regrade(&self, grading: WeightSystem, cap: i64) -> PlaneMap<K> {
        PlaneMap {
            fx: self.fx.truncate(&grading, cap + grading.level_x()),
            fy: self.fy.truncate(&grading, cap + grading.level_y()),
            grading,
            cap,
        }
    }

    /// Compositional inverse through `cap` by the fixed point
    /// `Ψ = A⁻¹((x, y) − N(Ψ))`, where `A` is the linear part and `N` the rest.
    /// Each step fixes one more total degree, so step `d` runs modulo degree
    /// `d + 1`.
    pub fn invert(&self, cap: i64) -> Result<PlaneMap<K>> {
        if cap < 0 {
            return Err(Error::NegativeCap(cap));
        }
        let [[a, b], [c, d]] = self.linear_part();
        let det = a.clone() * d.clone() - b.clone() * c.clone();
        if det.is_zero() {
            return Err(Error::SingularLinearPart);
        }
        let w = &self.grading;
        let (cx, cy) = (cap + w.level_x(), cap + w.level_y());
        let linear = |p: &Polynomial<K>| {
            Polynomial::from_terms(
                [(1, 0), (0, 1)]
                    .into_iter()
                    .map(|(i, j)| (crate::poly::Monomial::new(i, j), p.coeff(i, j))),
            )
        };
        let nx = &self.fx - &linear(&self.fx);
        let ny = &self.fy - &linear(&self.fy);
        let inv = K::one() / det;
        let apply_inverse = |u: Polynomial<K>, v: Polynomial<K>| {
            (
                (&u.scale(&d) - &v.scale(&b)).scale(&inv),
                (&v.scale(&a) - &u.scale(&c)).scale(&inv),
            )
        };
        let (mut px, mut py) = apply_inverse(Polynomial::x(), Polynomial::y());
        let min_level = w.level_x().min(w.level_y()).max(1);
        let top = cx.max(cy) / min_level + 1;
        let step = |px: &Polynomial<K>, py: &Polynomial<K>, deg: i64| {
            let keep_x = |m: &crate::poly::Monomial| m.degree() as i64 <= deg && w.level(m.ex, m.ey) <= cx;
            let keep_y = |m: &crate::poly::Monomial| m.degree() as i64 <= deg && w.level(m.ex, m.ey) <= cy;
            let ex = nx.compose_filtered(px, py, &keep_x);
            let ey = ny.compose_filtered(px, py, &keep_y);
            let (qx, qy) = apply_inverse(&Polynomial::x() - &ex, &Polynomial::y() - &ey);
            (qx.filter(&keep_x), qy.filter(&keep_y))
        };
        for deg in 2..=top {
            (px, py) = step(&px, &py, deg);
        }
        let (qx, qy) = step(&px, &py, top + 1);
        if qx != px || qy != py {
            return Err(Error::NotConverged(cap));
        }
        Ok(PlaneMap {
            fx: px,
            fy: py,
            grading: w.clone(),
            cap,
        })
    }

    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L + Copy) -> PlaneMap<L> {
        PlaneMap {
            fx: self.fx.map_coeffs(f),
            fy: self.fy.map_coeffs(f),
            grading: self.grading.clone(),
            cap: self.cap,
        }
    }
}

/// `Φ*form` truncated at `cap`.
pub fn pullback<K: Scalar>(
    map: &PlaneMap<K>,
    form: &DifferentialForm<K>,
    cap: i64,
) -> Result<DifferentialForm<K>> {
    map.pullback(form, cap)
}

/// Inverse of `map` through `cap`.
pub fn invert_map<K: Scalar>(map: &PlaneMap<K>, cap: i64) -> Result<PlaneMap<K>> {
    map.invert(cap)
}
