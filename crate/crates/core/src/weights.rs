use std::fmt;

use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, int, lcm_denominators, parse_rational, rat, Rational};

/// Weights `(m1, m2)` of a quasihomogeneous function of degree 1.
///
/// Quasidegrees are bucketed into integer levels:
/// `level(x^i y^j) = denom * (m1*i + m2*j)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightSystem {
    m1: Rational,
    m2: Rational,
    denom: i64,
    a: i64,
    b: i64,
}

impl WeightSystem {
    pub fn new(m1: Rational, m2: Rational) -> Result<Self> {
        if !m1.is_positive() || !m2.is_positive() {
            return Err(Error::NotQuasihomogeneous);
        }
        let denom = lcm_denominators([&m1, &m2])
            .to_i64()
            .ok_or_else(|| Error::Parse("weight denominators too large".into()))?;
        let a = (&m1 * int(denom)).to_integer().to_i64().unwrap();
        let b = (&m2 * int(denom)).to_integer().to_i64().unwrap();
        Ok(WeightSystem { m1, m2, denom, a, b })
    }

    /// Grading by total degree.
    pub fn total_degree() -> Self {
        WeightSystem::new(Rational::one(), Rational::one()).unwrap()
    }

    /// Weights of `x + y^2` (and of `x ± y^2`).
    pub fn a1() -> Self {
        WeightSystem::new(Rational::one(), rat(1, 2)).unwrap()
    }

    /// Weights of a Morse function `a x^2 + b y^2`; levels equal total degree.
    pub fn morse() -> Self {
        WeightSystem::new(rat(1, 2), rat(1, 2)).unwrap()
    }

    pub fn m1(&self) -> &Rational {
        &self.m1
    }

    pub fn m2(&self) -> &Rational {
        &self.m2
    }

    /// `M = m1 + m2`.
    pub fn total(&self) -> Rational {
        &self.m1 + &self.m2
    }

    pub fn denom(&self) -> i64 {
        self.denom
    }

    /// Level of `x`.
    pub fn level_x(&self) -> i64 {
        self.a
    }

    /// Level of `y`.
    pub fn level_y(&self) -> i64 {
        self.b
    }

    pub fn level(&self, ex: u32, ey: u32) -> i64 {
        self.a * ex as i64 + self.b * ey as i64
    }

    pub fn quasidegree(&self, ex: u32, ey: u32) -> Rational {
        &self.m1 * int(ex as i64) + &self.m2 * int(ey as i64)
    }

    /// Level of quasidegree `q`, rounded down.
    pub fn level_of(&self, q: &Rational) -> i64 {
        (q * int(self.denom)).floor().to_integer().to_i64().unwrap_or(i64::MAX)
    }

    /// Level of the function `f` itself (quasidegree 1).
    pub fn unit_level(&self) -> i64 {
        self.denom
    }

    pub fn default_cap(&self) -> i64 {
        10 * self.denom
    }

    /// Monomials `(ex, ey)` of the given level, x-power descending.
    pub fn monomials_at(&self, level: i64) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        if level < 0 {
            return out;
        }
        let mut ex = level / self.a;
        loop {
            let rest = level - ex * self.a;
            if rest % self.b == 0 {
                out.push((ex as u32, (rest / self.b) as u32));
            }
            if ex == 0 {
                break;
            }
            ex -= 1;
        }
        out
    }

    /// Parses `"m1,m2"` with rational entries (`"1,1/2"`), `"m1/m2"` with
    /// integer entries, or `"p1/q1/p2/q2"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("weights must look like m1,m2: {s:?}"));
        if let Some((a, b)) = s.split_once(',') {
            return WeightSystem::new(parse_rational(a)?, parse_rational(b)?);
        }
        match s.split('/').collect::<Vec<_>>().as_slice() {
            [a, b] => WeightSystem::new(parse_rational(a)?, parse_rational(b)?),
            [p1, q1, p2, q2] => WeightSystem::new(
                parse_rational(&format!("{p1}/{q1}"))?,
                parse_rational(&format!("{p2}/{q2}"))?,
            ),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.m1), format_rational(&self.m2))
    }
}

#[derive(Serialize, Deserialize)]
struct WeightsJson {
    m1: String,
    m2: String,
    denom: i64,
}

impl Serialize for WeightSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WeightsJson {
            m1: format_rational(&self.m1),
            m2: format_rational(&self.m2),
            denom: self.denom,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = WeightsJson::deserialize(d)?;
        let m1 = parse_rational(&j.m1).map_err(D::Error::custom)?;
        let m2 = parse_rational(&j.m2).map_err(D::Error::custom)?;
        WeightSystem::new(m1, m2).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levels() {
        let w = WeightSystem::new(rat(1, 2), rat(1, 3)).unwrap();
        assert_eq!(w.denom(), 6);
        assert_eq!(w.level(1, 1), 5);
        assert_eq!(w.monomials_at(6), vec![(2, 0), (0, 3)]);
        assert_eq!(w.level_of(&rat(5, 3)), 10);
        assert!(WeightSystem::new(rat(-1, 2), rat(1, 2)).is_err());
        assert_eq!(WeightSystem::parse("1/2,1/3").unwrap(), w);
        assert_eq!(WeightSystem::parse("1/2/1/3").unwrap(), w);
        assert!(WeightSystem::parse("1/2/3").is_err());
    }

    #[test]
    fn parse_weights() {
        let w = WeightSystem::parse("1, 1/2").unwrap();
        assert_eq!(w, WeightSystem::a1());
        assert_eq!(WeightSystem::parse("2/3").unwrap(), WeightSystem::parse("2,3").unwrap());
        assert!(WeightSystem::parse("1;2").is_err());
    }
}
