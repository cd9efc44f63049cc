//! Truncated univariate power series.

use std::fmt;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::scalar::{format_rational, Rational, Scalar};
use crate::weights::WeightSystem;

/// `c_0 + c_1 t + ... + c_N t^N + O(t^{N+1})`.
#[derive(Clone, PartialEq)]
pub struct Series<K> {
    coeffs: Vec<K>,
}

impl<K: Scalar> Series<K> {
    /// # Panics
    /// On an empty coefficient list.
    pub fn new(coeffs: Vec<K>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least one coefficient");
        Series { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        Series::new(vec![K::zero(); order + 1])
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = K::one();
        s
    }

    /// The series `t` (order at least 1).
    pub fn identity(order: usize) -> Self {
        let mut s = Self::zero(order.max(1));
        s.coeffs[1] = K::one();
        s
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Series::new(c.iter().map(|&v| K::from_i64(v)).collect())
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> K {
        self.coeffs.get(k).cloned().unwrap_or_else(K::zero)
    }

    /// Pads with zeros or truncates to the given order.
    pub fn with_order(&self, order: usize) -> Self {
        Series::new((0..=order).map(|k| self.coeff(k)).collect())
    }

    /// Equal as polynomials, ignoring trailing zeros.
    pub fn same_terms(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|k| self.coeff(k) == other.coeff(k))
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Series::new((0..=n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &K) -> Self {
        Series::new(self.coeffs.iter().map(|v| v.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.order().min(other.order());
        Series::new(K::convolve(&self.coeffs, &other.coeffs, n))
    }

    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Series::zero(0);
        }
        Series::new(
            (1..self.coeffs.len())
                .map(|k| self.coeffs[k].clone() * K::from_i64(k as i64))
                .collect(),
        )
    }

    /// Primitive vanishing at 0; raises the order by one.
    pub fn integral(&self) -> Self {
        let mut out = vec![K::zero()];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.clone() / K::from_i64(k as i64 + 1)),
        );
        Series::new(out)
    }

    /// `t * self`; raises the order by one.
    pub fn shift(&self) -> Self {
        let mut out = vec![K::zero()];
        out.extend(self.coeffs.iter().cloned());
        Series::new(out)
    }

    pub fn eval(&self, t: &K) -> K {
        self.coeffs
            .iter()
            .rev()
            .fold(K::zero(), |acc, c| acc * t.clone() + c.clone())
    }

    /// `self^p` for a series with leading coefficient 1, by the binomial
    /// recurrence `n g_n = sum_{k=1..n} (p k − (n − k)) s_k g_{n−k}`.
    pub fn power(&self, p: &Rational) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(Error::UnnormalizedLeadingTerm);
        }
        let p = K::from_rational(p);
        let n = self.order();
        let mut g = vec![K::one()];
        for m in 1..=n {
            let mut acc = K::zero();
            for k in 1..=m {
                let sk = &self.coeffs[k];
                if sk.is_zero() {
                    continue;
                }
                let factor = p.clone() * K::from_i64(k as i64) - K::from_i64((m - k) as i64);
                acc = acc + factor * sk.clone() * g[m - k].clone();
            }
            g.push(acc / K::from_i64(m as i64));
        }
        Ok(Series::new(g))
    }

    /// `self(inner(t))` for `inner(0) = 0`, truncated at the smaller order.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::InvariantViolation(
                "inner series must vanish at 0".into(),
            ));
        }
        let n = self.order().min(inner.order());
        let inner = inner.with_order(n);
        let mut acc = Series::zero(n);
        for c in self.coeffs.iter().take(n + 1).rev() {
            acc = acc.mul(&inner);
            acc.coeffs[0] = acc.coeffs[0].clone() + c.clone();
        }
        Ok(acc)
    }

    /// Compositional inverse of a series with `s(0) = 0`, `s'(0) ≠ 0`.
    pub fn revert(&self) -> Result<Self> {
        let n = self.order();
        if n == 0 || !self.coeffs[0].is_zero() || self.coeffs[1].is_zero() {
            return Err(Error::InvariantViolation(
                "series reversion needs s(0) = 0 and s'(0) ≠ 0".into(),
            ));
        }
        let inv_lead = K::one() / self.coeffs[1].clone();
        let mut r = Series::identity(1).scale(&inv_lead);
        let mut prec = 1;
        // Newton steps r ← r − (s∘r − t)/(s′∘r) double the correct order.
        while prec < n {
            prec = (2 * prec).min(n);
            let s = self.with_order(prec);
            let r_p = r.with_order(prec);
            let err = s.compose(&r_p)?.add(&Series::identity(prec).scale(&-K::one()));
            let slope = s.derivative().compose(&r_p.with_order(prec - 1))?;
            let lead = slope.coeff(0);
            let inv = slope.scale(&(K::one() / lead.clone())).power(&Rational::from_integer((-1).into()))?;
            let step = err.mul(&inv.scale(&(K::one() / lead)).with_order(prec));
            r = r_p.add(&step.scale(&-K::one()));
        }
        Ok(r)
    }

    /// `sum_k c_k f^k` truncated at `cap`.
    pub fn compose_poly(&self, f: &Polynomial<K>, w: &WeightSystem, cap: i64) -> Polynomial<K> {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul_truncated(f, w, cap);
            acc.add_term(crate::poly::Monomial::ONE, c.clone());
        }
        acc.truncate(w, cap)
    }

    /// `sum_k c_k f^k` without truncation.
    pub fn compose_poly_exact(&self, f: &Polynomial<K>) -> Polynomial<K> {
        let mut acc = Polynomial::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * f;
            acc.add_term(crate::poly::Monomial::ONE, c.clone());
        }
        acc
    }

    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L) -> Series<L> {
        Series::new(self.coeffs.iter().map(f).collect())
    }
}

impl<K: fmt::Debug> fmt::Debug for Series<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series{:?}", self.coeffs)
    }
}

impl fmt::Display for Series<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(format_rational).collect();
        write!(f, "[{}] + O(t^{})", parts.join(", "), self.coeffs.len())
    }
}

/// `c(f)` truncated at `cap`.
pub fn compose_series<K: Scalar>(
    c: &Series<K>,
    f: &Polynomial<K>,
    w: &WeightSystem,
    cap: i64,
) -> Polynomial<K> {
    c.compose_poly(f, w, cap)
}

/// `s^p` for `s(0) = 1`.
pub fn series_power<K: Scalar>(s: &Series<K>, p: &Rational) -> Result<Series<K>> {
    s.power(p)
}
