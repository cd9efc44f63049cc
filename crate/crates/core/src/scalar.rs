//! Coefficient fields.
//!
//! Every algebraic object in the crate is generic over [`Scalar`]. The exact
//! engine instantiates it with [`Rational`]; the float instantiations exist so
//! the same polynomials and forms can be evaluated numerically.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::poly::Monomial;

/// Arbitrary precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

/// A field the engine can compute over.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_rational(r: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    /// Square root when it exists in the field.
    fn sqrt_exact(&self) -> Option<Self>;

    /// Sign as -1, 0 or 1.
    fn sign(&self) -> i32 {
        if self.is_zero() {
            0
        } else if *self > Self::zero() {
            1
        } else {
            -1
        }
    }

    fn to_f64(&self) -> f64;

    /// `Σ a_i b_j` over the product exponents accepted by `keep`, without
    /// zero entries. Fields with costly normalization override this.
    fn mul_sparse(
        a: &BTreeMap<Monomial, Self>,
        b: &BTreeMap<Monomial, Self>,
        keep: &dyn Fn(&Monomial) -> bool,
    ) -> BTreeMap<Monomial, Self> {
        let mut out: BTreeMap<Monomial, Self> = BTreeMap::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                let m = ma.mul(mb);
                if keep(&m) {
                    let e = out.entry(m).or_insert_with(Self::zero);
                    *e = e.clone() + ca.clone() * cb.clone();
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    /// `Σ_{i+j=k} a_i b_j` for `k ≤ n`.
    fn convolve(a: &[Self], b: &[Self], n: usize) -> Vec<Self> {
        let mut out = vec![Self::zero(); n + 1];
        for (i, x) in a.iter().enumerate().take(n + 1) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n + 1 - i) {
                out[i + j] = out[i + j].clone() + x.clone() * y.clone();
            }
        }
        out
    }
}

/// Numerators over a common denominator.
fn clear_denominators(p: &BTreeMap<Monomial, Rational>) -> (Vec<(Monomial, BigInt)>, BigInt) {
    let d = lcm_denominators(p.values());
    let nums = p.iter().map(|(m, c)| (*m, c.numer() * (&d / c.denom()))).collect();
    (nums, d)
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = isqrt_exact(self.numer())?;
        let d = isqrt_exact(self.denom())?;
        Some(Rational::new(n, d))
    }

    fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    /// Integer products accumulated densely; one reduction per output term.
    fn mul_sparse(
        a: &BTreeMap<Monomial, Self>,
        b: &BTreeMap<Monomial, Self>,
        keep: &dyn Fn(&Monomial) -> bool,
    ) -> BTreeMap<Monomial, Self> {
        if a.is_empty() || b.is_empty() {
            return BTreeMap::new();
        }
        let (na, da) = clear_denominators(a);
        let (nb, db) = clear_denominators(b);
        let span = |v: &[(Monomial, BigInt)]| {
            v.iter().fold((0, 0), |(x, y), (m, _)| (x.max(m.ex as usize), y.max(m.ey as usize)))
        };
        let (ax, ay) = span(&na);
        let (bx, by) = span(&nb);
        let (nx, ny) = (ax + bx + 1, ay + by + 1);
        let mut acc: Vec<Option<BigInt>> = vec![None; nx * ny];
        for (ma, ca) in &na {
            for (mb, cb) in &nb {
                let m = ma.mul(mb);
                if !keep(&m) {
                    continue;
                }
                let prod = ca * cb;
                match &mut acc[m.ex as usize * ny + m.ey as usize] {
                    Some(v) => *v += prod,
                    slot => *slot = Some(prod),
                }
            }
        }
        let d = da * db;
        acc.into_iter()
            .enumerate()
            .filter_map(|(i, v)| {
                let v = v.filter(|v| !v.is_zero())?;
                let m = Monomial::new((i / ny) as u32, (i % ny) as u32);
                Some((m, Rational::new(v, d.clone())))
            })
            .collect()
    }

    fn convolve(a: &[Self], b: &[Self], n: usize) -> Vec<Self> {
        let clear = |v: &[Self]| {
            let d = lcm_denominators(v.iter().take(n + 1));
            let nums: Vec<BigInt> = v.iter().take(n + 1).map(|c| c.numer() * (&d / c.denom())).collect();
            (nums, d)
        };
        let (na, da) = clear(a);
        let (nb, db) = clear(b);
        let mut acc = vec![BigInt::zero(); n + 1];
        for (i, x) in na.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in nb.iter().enumerate().take(n + 1 - i) {
                acc[i + j] += x * y;
            }
        }
        let d = da * db;
        acc.into_iter().map(|v| Rational::new(v, d.clone())).collect()
    }
}

fn isqrt_exact(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// The real `n`-th root of `r` when it is rational (`n` odd for negative `r`).
pub fn root_exact(r: &Rational, n: u32) -> Option<Rational> {
    if n == 0 || (r.is_negative() && n % 2 == 0) {
        return None;
    }
    let exact = |v: &BigInt| {
        let root = v.nth_root(n);
        (root.pow(n) == *v).then_some(root)
    };
    Some(Rational::new(exact(r.numer())?, exact(r.denom())?))
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(r: &Rational) -> Self {
                num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
            }

            fn sqrt_exact(&self) -> Option<Self> {
                (*self >= 0.0).then(|| self.sqrt())
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"3"`, `"-1/2"`; rejects zero denominators and decimal points.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn lcm_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    it.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
