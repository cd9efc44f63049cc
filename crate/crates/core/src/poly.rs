//! Sparse bivariate polynomials.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{format_rational, Rational, Scalar};
use crate::weights::WeightSystem;

/// `x^ex y^ey`.
///
/// Ordered by total degree, then by descending x-power, so `1 < x < y < x^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub ex: u32,
    pub ey: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { ex: 0, ey: 0 };

    pub fn new(ex: u32, ey: u32) -> Self {
        Monomial { ex, ey }
    }

    pub fn degree(&self) -> u32 {
        self.ex + self.ey
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial::new(self.ex + other.ex, self.ey + other.ey)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(other.ex.cmp(&self.ex))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.ex, self.ey) {
            (0, 0) => write!(f, "1"),
            (ex, 0) => write!(f, "{}", pow_str("x", ex)),
            (0, ey) => write!(f, "{}", pow_str("y", ey)),
            (ex, ey) => write!(f, "{}{}", pow_str("x", ex), pow_str("y", ey)),
        }
    }
}

fn pow_str(v: &str, e: u32) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

/// Polynomial in `x, y` with no stored zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Polynomial<K> {
    terms: BTreeMap<Monomial, K>,
}

impl<K: Scalar> Default for Polynomial<K> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: Scalar> Polynomial<K> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn constant(c: K) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn term(c: K, ex: u32, ey: u32) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::new(ex, ey), c);
        p
    }

    pub fn x() -> Self {
        Self::term(K::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::term(K::one(), 0, 1)
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, K)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    /// `sum c * x^i * y^j` from `(c, i, j)` triples with integer coefficients.
    pub fn from_ints(it: &[(i64, u32, u32)]) -> Self {
        Self::from_terms(it.iter().map(|&(c, i, j)| (Monomial::new(i, j), K::from_i64(c))))
    }

    pub fn add_term(&mut self, m: Monomial, c: K) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v = v.clone() + c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &K)> + '_ {
        self.terms.iter()
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> + '_ {
        self.terms.keys()
    }

    pub fn coeff(&self, ex: u32, ey: u32) -> K {
        self.terms
            .get(&Monomial::new(ex, ey))
            .cloned()
            .unwrap_or_else(K::zero)
    }

    pub fn constant_term(&self) -> K {
        self.coeff(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn max_level(&self, w: &WeightSystem) -> Option<i64> {
        self.terms.keys().map(|m| w.level(m.ex, m.ey)).max()
    }

    pub fn min_level(&self, w: &WeightSystem) -> Option<i64> {
        self.terms.keys().map(|m| w.level(m.ex, m.ey)).min()
    }

    /// Smallest power of `x` present, i.e. the largest `k` with `self ∈ (x^k)`.
    pub fn x_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.ex).min()
    }

    /// Membership in the ideal `(x^k)`; the zero polynomial belongs to all of them.
    pub fn in_x_ideal(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.ex >= k)
    }

    pub fn scale(&self, c: &K) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (*m, v.clone() * c.clone()))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, ex: u32, ey: u32) -> Self {
        let s = Monomial::new(ex, ey);
        Polynomial {
            terms: self.terms.iter().map(|(m, v)| (m.mul(&s), v.clone())).collect(),
        }
    }

    /// Exact division by `x^k`.
    ///
    /// # Panics
    /// If some term has x-power below `k`.
    pub fn div_x_pow(&self, k: u32) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| {
                    assert!(m.ex >= k, "{} not divisible by x^{k}", m);
                    (Monomial::new(m.ex - k, m.ey), v.clone())
                })
                .collect(),
        }
    }

    pub fn truncate(&self, w: &WeightSystem, cap: i64) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.level(m.ex, m.ey) <= cap)
                .map(|(m, v)| (*m, v.clone()))
                .collect(),
        }
    }

    /// Terms of exactly the given level.
    pub fn level_part(&self, w: &WeightSystem, level: i64) -> Self {
        Polynomial {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| w.level(m.ex, m.ey) == level)
                .map(|(m, v)| (*m, v.clone()))
                .collect(),
        }
    }

    /// Splits into homogeneous pieces keyed by level.
    pub fn level_parts(&self, w: &WeightSystem) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(w.level(m.ex, m.ey))
                .or_default()
                .terms
                .insert(*m, c.clone());
        }
        out
    }

    /// Every term sits at `level`.
    pub fn is_homogeneous(&self, w: &WeightSystem, level: i64) -> bool {
        self.terms.keys().all(|m| w.level(m.ex, m.ey) == level)
    }

    pub fn mul_truncated(&self, other: &Self, w: &WeightSystem, cap: i64) -> Self {
        self.mul_filtered(other, &|m| w.level(m.ex, m.ey) <= cap)
    }

    /// Product restricted to the monomials `keep` accepts.
    pub fn mul_filtered(&self, other: &Self, keep: &dyn Fn(&Monomial) -> bool) -> Self {
        Polynomial {
            terms: K::mul_sparse(&self.terms, &other.terms, keep),
        }
    }

    /// Terms `keep` accepts.
    pub fn filter(&self, keep: &dyn Fn(&Monomial) -> bool) -> Self {
        Polynomial {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn pow_truncated(&self, n: u32, w: &WeightSystem, cap: i64) -> Self {
        let mut acc = Self::one().truncate(w, cap);
        for _ in 0..n {
            acc = acc.mul_truncated(self, w, cap);
        }
        acc
    }

    /// `∂/∂x`.
    pub fn dx(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(m, _)| m.ex > 0).map(|(m, c)| {
            (
                Monomial::new(m.ex - 1, m.ey),
                c.clone() * K::from_i64(m.ex as i64),
            )
        }))
    }

    /// `∂/∂y`.
    pub fn dy(&self) -> Self {
        Self::from_terms(self.terms.iter().filter(|(m, _)| m.ey > 0).map(|(m, c)| {
            (
                Monomial::new(m.ex, m.ey - 1),
                c.clone() * K::from_i64(m.ey as i64),
            )
        }))
    }

    /// Antiderivative in `x` vanishing on `x = 0`.
    pub fn integrate_x(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            (
                Monomial::new(m.ex + 1, m.ey),
                c.clone() / K::from_i64(m.ex as i64 + 1),
            )
        }))
    }

    pub fn eval(&self, x: &K, y: &K) -> K {
        let mut acc = K::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for _ in 0..m.ex {
                t = t * x.clone();
            }
            for _ in 0..m.ey {
                t = t * y.clone();
            }
            acc = acc + t;
        }
        acc
    }

    /// Restriction to `x = 0`, as coefficients of `y^0, y^1, ...`.
    pub fn restrict_to_boundary(&self) -> Vec<K> {
        let deg = self
            .terms
            .keys()
            .filter(|m| m.ex == 0)
            .map(|m| m.ey)
            .max();
        let Some(deg) = deg else { return Vec::new() };
        let mut out = vec![K::zero(); deg as usize + 1];
        for (m, c) in self.terms.iter().filter(|(m, _)| m.ex == 0) {
            out[m.ey as usize] = c.clone();
        }
        out
    }

    /// Substitutes `x ↦ px, y ↦ py`.
    pub fn compose(&self, px: &Self, py: &Self) -> Self {
        self.compose_with(px, py, |a, b| a * b)
    }

    /// Substitution with every product truncated at `cap`. Since all levels are
    /// nonnegative this equals the exact substitution truncated at `cap`.
    /// Terms and Horner rows that cannot reach level `cap` are skipped.
    /// Horner runs over the variable of larger degree.
    pub fn compose_truncated(&self, px: &Self, py: &Self, w: &WeightSystem, cap: i64) -> Self {
        let low = |p: &Self| p.terms.keys().map(|m| w.level(m.ex, m.ey)).min().unwrap_or(cap + 1);
        let (lx, ly) = (low(px), low(py));
        let live: Vec<(Monomial, &K)> = self
            .terms
            .iter()
            .filter(|(m, _)| lx * m.ex as i64 + ly * m.ey as i64 <= cap)
            .map(|(m, c)| (*m, c))
            .collect();
        let max_ex = live.iter().map(|(m, _)| m.ex).max().unwrap_or(0);
        let max_ey = live.iter().map(|(m, _)| m.ey).max().unwrap_or(0);
        if max_ey > max_ex {
            let swapped = live.into_iter().map(|(m, c)| (Monomial::new(m.ey, m.ex), c)).collect();
            Self::horner_truncated(swapped, py, px, ly, w, cap)
        } else {
            Self::horner_truncated(live, px, py, lx, w, cap)
        }
    }

    /// `Σ c u^i v^j` over `terms` by Horner in `u`, where `u` has level at
    /// least `lu`.
    fn horner_truncated(terms: Vec<(Monomial, &K)>, u: &Self, v: &Self, lu: i64, w: &WeightSystem, cap: i64) -> Self {
        let Some(max_i) = terms.iter().map(|(m, _)| m.ex).max() else {
            return Self::zero();
        };
        let max_j = terms.iter().map(|(m, _)| m.ey).max().unwrap_or(0);
        let keep_below = |c: i64| move |m: &Monomial| w.level(m.ex, m.ey) <= c;
        let mut vs = vec![Self::one()];
        for k in 1..=max_j as usize {
            let next = vs[k - 1].mul_filtered(v, &keep_below(cap));
            vs.push(next);
        }
        let mut rows = vec![Self::zero(); max_i as usize + 1];
        for (m, c) in terms {
            rows[m.ex as usize].add_scaled(&vs[m.ey as usize], c);
        }
        let mut acc = Self::zero();
        for (i, row) in rows.iter().enumerate().rev() {
            let c = cap - lu * i as i64;
            acc = acc.mul_filtered(u, &keep_below(c));
            acc.add_scaled(&row.filter(&keep_below(c)), &K::one());
        }
        acc
    }

    /// Substitution modulo the monomials `keep` rejects, which must span an
    /// ideal.
    pub fn compose_filtered(&self, px: &Self, py: &Self, keep: &dyn Fn(&Monomial) -> bool) -> Self {
        self.compose_with(px, py, |a, b| a.mul_filtered(b, keep)).filter(keep)
    }

    /// Horner in `px` over coefficients that are polynomials in `py`.
    fn compose_with(&self, px: &Self, py: &Self, mul: impl Fn(&Self, &Self) -> Self) -> Self {
        let Some(max_ex) = self.terms.keys().map(|m| m.ex).max() else {
            return Self::zero();
        };
        let max_ey = self.terms.keys().map(|m| m.ey).max().unwrap_or(0);
        let mut ys = vec![Self::one()];
        for k in 1..=max_ey as usize {
            let next = mul(&ys[k - 1], py);
            ys.push(next);
        }
        let mut rows = vec![Self::zero(); max_ex as usize + 1];
        for (m, c) in &self.terms {
            rows[m.ex as usize].add_scaled(&ys[m.ey as usize], c);
        }
        let mut acc = Self::zero();
        for row in rows.iter().rev() {
            acc = mul(&acc, px);
            acc.add_scaled(row, &K::one());
        }
        acc
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &K) {
        for (m, v) in &other.terms {
            self.add_term(*m, v.clone() * c.clone());
        }
    }

    pub fn map_coeffs<L: Scalar>(&self, f: impl Fn(&K) -> L) -> Polynomial<L> {
        Polynomial::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }
}

impl Polynomial<Rational> {
    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

impl<K: fmt::Debug> fmt::Debug for Polynomial<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})*{m}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Polynomial<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, abs) = if *c < Rational::zero() {
                (true, -c.clone())
            } else {
                (false, c.clone())
            };
            match (i, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if *m == Monomial::ONE {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl<K: Scalar> Add for &Polynomial<K> {
    type Output = Polynomial<K>;

    fn add(self, rhs: Self) -> Polynomial<K> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<K: Scalar> Sub for &Polynomial<K> {
    type Output = Polynomial<K>;

    fn sub(self, rhs: Self) -> Polynomial<K> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<K: Scalar> Mul for &Polynomial<K> {
    type Output = Polynomial<K>;

    fn mul(self, rhs: Self) -> Polynomial<K> {
        self.mul_filtered(rhs, &|_| true)
    }
}

impl<K: Scalar> Neg for &Polynomial<K> {
    type Output = Polynomial<K>;

    fn neg(self) -> Polynomial<K> {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl<K: Scalar> $tr for Polynomial<K> {
            type Output = Polynomial<K>;

            fn $f(self, rhs: Self) -> Polynomial<K> {
                (&self).$f(&rhs)
            }
        }

        impl<K: Scalar> $tr<&Polynomial<K>> for Polynomial<K> {
            type Output = Polynomial<K>;

            fn $f(self, rhs: &Polynomial<K>) -> Polynomial<K> {
                (&self).$f(rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<K: Scalar> Neg for Polynomial<K> {
    type Output = Polynomial<K>;

    fn neg(self) -> Polynomial<K> {
        -&self
    }
}
