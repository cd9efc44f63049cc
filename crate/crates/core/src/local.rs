//! Local algebras of quasihomogeneous (boundary) singularities.
//!
//! For a quasihomogeneous `f` the ideals `(x f_x, f_y)` and `(f_x, f_y)` are
//! graded, so the local quotient can be computed one quasidegree level at a
//! time by exact Gaussian elimination. Each level is kept in reduced echelon
//! form together with the generator combinations that produced every row,
//! which is what lets [`graded_reduce`] hand back explicit cofactors.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{Monomial, Polynomial};
use crate::scalar::{int, Rational, Scalar};
use crate::weights::WeightSystem;

/// Infers `(m1, m2)` with `m1 i + m2 j = 1` on the support of `f`.
pub fn detect_weights<K: Scalar>(f: &Polynomial<K>) -> Result<WeightSystem> {
    if f.is_zero() {
        return Err(Error::NotQuasihomogeneous);
    }
    if !f.constant_term().is_zero() {
        return Err(Error::NonzeroAtOrigin);
    }
    let rows: Vec<(i64, i64)> = f.monomials().map(|m| (m.ex as i64, m.ey as i64)).collect();
    let (i1, j1) = rows[0];
    let pair = rows
        .iter()
        .map(|&(i2, j2)| (i2, j2, i1 * j2 - i2 * j1))
        .find(|&(_, _, det)| det != 0);
    let Some((i2, j2, det)) = pair else {
        // Collinear support: one equation, or contradictory ones.
        return if rows.iter().all(|&r| r == rows[0]) {
            Err(Error::Underdetermined)
        } else {
            Err(Error::NotQuasihomogeneous)
        };
    };
    let m1 = Rational::new((j2 - j1).into(), det.into());
    let m2 = Rational::new((i1 - i2).into(), det.into());
    let consistent = rows
        .iter()
        .all(|&(i, j)| &m1 * int(i) + &m2 * int(j) == Rational::one());
    if !consistent {
        return Err(Error::NotQuasihomogeneous);
    }
    WeightSystem::new(m1, m2)
}

/// `f(t^{m1} x, t^{m2} y) = t f(x, y)`.
pub fn is_quasihomogeneous<K: Scalar>(f: &Polynomial<K>, w: &WeightSystem) -> bool {
    !f.is_zero() && f.is_homogeneous(w, w.unit_level())
}

#[derive(Clone, Debug)]
struct EchelonRow<K> {
    pivot: usize,
    values: Vec<K>,
    /// Combination of `monomial * generator` products giving this row.
    combo: BTreeMap<(usize, Monomial), K>,
}

/// Reduced echelon form of the ideal's piece at one level.
#[derive(Clone, Debug)]
struct LevelEchelon<K> {
    columns: Vec<Monomial>,
    rows: Vec<EchelonRow<K>>,
    survivors: Vec<Monomial>,
}

impl<K: Scalar> LevelEchelon<K> {
    fn build(level: i64, gens: &[(Polynomial<K>, i64)], w: &WeightSystem) -> Self {
        // x-power descending, so pivots prefer high x-powers.
        let columns: Vec<Monomial> = w
            .monomials_at(level)
            .into_iter()
            .map(|(i, j)| Monomial::new(i, j))
            .collect();
        let index: BTreeMap<Monomial, usize> =
            columns.iter().enumerate().map(|(k, m)| (*m, k)).collect();
        let mut pending: Vec<(Vec<K>, BTreeMap<(usize, Monomial), K>)> = Vec::new();
        for (g_idx, (g, g_level)) in gens.iter().enumerate() {
            for (i, j) in w.monomials_at(level - g_level) {
                let mult = Monomial::new(i, j);
                let mut values = vec![K::zero(); columns.len()];
                for (m, c) in g.terms() {
                    values[index[&m.mul(&mult)]] = c.clone();
                }
                let mut combo = BTreeMap::new();
                combo.insert((g_idx, mult), K::one());
                pending.push((values, combo));
            }
        }
        let mut rows: Vec<EchelonRow<K>> = Vec::new();
        for col in 0..columns.len() {
            let Some(pos) = pending.iter().position(|(v, _)| !v[col].is_zero()) else {
                continue;
            };
            let (mut values, mut combo) = pending.swap_remove(pos);
            let inv = K::one() / values[col].clone();
            for v in values.iter_mut() {
                *v = v.clone() * inv.clone();
            }
            for c in combo.values_mut() {
                *c = c.clone() * inv.clone();
            }
            let eliminate = |target: &mut Vec<K>, tcombo: &mut BTreeMap<(usize, Monomial), K>| {
                let factor = target[col].clone();
                if factor.is_zero() {
                    return;
                }
                for (t, v) in target.iter_mut().zip(&values) {
                    *t = t.clone() - factor.clone() * v.clone();
                }
                combine(tcombo, &combo, &-factor);
            };
            for (v, c) in pending.iter_mut() {
                eliminate(v, c);
            }
            for row in rows.iter_mut() {
                eliminate(&mut row.values, &mut row.combo);
            }
            rows.push(EchelonRow {
                pivot: col,
                values,
                combo,
            });
        }
        let pivots: Vec<usize> = rows.iter().map(|r| r.pivot).collect();
        let survivors = columns
            .iter()
            .enumerate()
            .filter(|(k, _)| !pivots.contains(k))
            .map(|(_, m)| *m)
            .collect();
        LevelEchelon {
            columns,
            rows,
            survivors,
        }
    }

    /// Splits a homogeneous `g` into survivor coefficients and a generator combination.
    fn reduce(&self, g: &Polynomial<K>) -> (BTreeMap<Monomial, K>, BTreeMap<(usize, Monomial), K>) {
        let mut t: Vec<K> = self.columns.iter().map(|m| g.coeff(m.ex, m.ey)).collect();
        let mut lambda = BTreeMap::new();
        for row in &self.rows {
            let factor = t[row.pivot].clone();
            if factor.is_zero() {
                continue;
            }
            for (tv, rv) in t.iter_mut().zip(&row.values) {
                *tv = tv.clone() - factor.clone() * rv.clone();
            }
            combine(&mut lambda, &row.combo, &factor);
        }
        let rest = self
            .columns
            .iter()
            .zip(t)
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, v)| (*m, v))
            .collect();
        (rest, lambda)
    }
}

fn combine<K: Scalar>(
    into: &mut BTreeMap<(usize, Monomial), K>,
    from: &BTreeMap<(usize, Monomial), K>,
    factor: &K,
) {
    for (key, v) in from {
        let add = v.clone() * factor.clone();
        let entry = into.entry(*key).or_insert_with(K::zero);
        *entry = entry.clone() + add;
        if entry.is_zero() {
            into.remove(key);
        }
    }
}

/// A graded ideal generated by quasihomogeneous polynomials, with its
/// monomial quotient basis.
#[derive(Clone, Debug)]
pub struct GradedIdeal<K> {
    weights: WeightSystem,
    generators: Vec<(Polynomial<K>, i64)>,
    levels: Vec<LevelEchelon<K>>,
    basis: Vec<Monomial>,
}

impl<K: Scalar> GradedIdeal<K> {
    /// Eliminates level by level until a window of `max(level(x), level(y))`
    /// consecutive levels has no survivors; every higher level then lies in
    /// the ideal too.
    pub fn new(generators: Vec<Polynomial<K>>, w: &WeightSystem, cap: i64) -> Result<Self> {
        let mut gens = Vec::new();
        for g in generators {
            if g.is_zero() {
                continue;
            }
            let level = g.min_level(w).unwrap();
            if !g.is_homogeneous(w, level) {
                return Err(Error::NotQuasihomogeneous);
            }
            gens.push((g, level));
        }
        let window = w.level_x().max(w.level_y());
        let mut levels = Vec::new();
        let mut quiet = 0;
        let mut level = 0;
        loop {
            if level > cap {
                return Err(Error::MultiplicityNotFinite(cap));
            }
            let ech = LevelEchelon::build(level, &gens, w);
            quiet = if ech.survivors.is_empty() { quiet + 1 } else { 0 };
            levels.push(ech);
            if quiet >= window {
                break;
            }
            level += 1;
        }
        let mut basis: Vec<Monomial> = levels.iter().flat_map(|l| l.survivors.clone()).collect();
        basis.sort();
        Ok(GradedIdeal {
            weights: w.clone(),
            generators: gens.into_iter().collect(),
            levels,
            basis,
        })
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn weights(&self) -> &WeightSystem {
        &self.weights
    }

    fn echelon(&self, level: i64) -> std::borrow::Cow<'_, LevelEchelon<K>> {
        match self.levels.get(level as usize) {
            Some(e) => std::borrow::Cow::Borrowed(e),
            None => std::borrow::Cow::Owned(LevelEchelon::build(level, &self.generators, &self.weights)),
        }
    }

    /// `g = sum c_i e_i + sum_k cofactor_k * generator_k`, with cofactors
    /// indexed like the nonzero generators passed to [`GradedIdeal::new`].
    pub fn reduce(&self, g: &Polynomial<K>) -> (Vec<K>, Vec<Polynomial<K>>) {
        let mut c = vec![K::zero(); self.basis.len()];
        let mut cof = vec![Polynomial::zero(); self.generators.len()];
        for (level, piece) in g.level_parts(&self.weights) {
            let ech = self.echelon(level);
            let (rest, lambda) = ech.reduce(&piece);
            for (m, v) in rest {
                let idx = self
                    .basis
                    .iter()
                    .position(|b| *b == m)
                    .expect("survivor outside the stored basis");
                c[idx] = v;
            }
            for ((gi, m), v) in lambda {
                cof[gi].add_term(m, v);
            }
        }
        (c, cof)
    }

    fn generator_index(&self, g: &Polynomial<K>) -> Option<usize> {
        self.generators.iter().position(|(h, _)| h == g)
    }
}

/// `g = sum c_i e_i + p·(x f_x) + q·f_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionCertificate<K> {
    pub c: Vec<K>,
    pub p: Polynomial<K>,
    pub q: Polynomial<K>,
}

impl<K: Scalar> ReductionCertificate<K> {
    /// Recombines the right-hand side.
    pub fn recombine(&self, basis: &[Monomial], gen_p: &Polynomial<K>, gen_q: &Polynomial<K>) -> Polynomial<K> {
        let mut out = &(&self.p * gen_p) + &(&self.q * gen_q);
        for (m, c) in basis.iter().zip(&self.c) {
            out.add_term(*m, c.clone());
        }
        out
    }
}

/// Germ `(f, H = {x = 0})` with its local algebra data.
#[derive(Clone, Debug)]
pub struct BoundaryGerm<K> {
    pub f: Polynomial<K>,
    pub weights: WeightSystem,
    pub mu: usize,
    pub mu1: usize,
    pub mu0: usize,
    pub basis: Vec<Monomial>,
    ideal: GradedIdeal<K>,
}

impl<K: Scalar> BoundaryGerm<K> {
    /// `x f_x`.
    pub fn x_fx(&self) -> Polynomial<K> {
        self.f.dx().mul_monomial(1, 0)
    }

    pub fn fy(&self) -> Polynomial<K> {
        self.f.dy()
    }

    pub fn ideal(&self) -> &GradedIdeal<K> {
        &self.ideal
    }
}

/// Milnor numbers and monomial basis of `O/(x f_x, f_y)`.
pub fn milnor_boundary<K: Scalar>(f: &Polynomial<K>, w: &WeightSystem, cap: i64) -> Result<BoundaryGerm<K>> {
    if !f.constant_term().is_zero() {
        return Err(Error::NonzeroAtOrigin);
    }
    if !is_quasihomogeneous(f, w) {
        return Err(Error::NotQuasihomogeneous);
    }
    let x_fx = f.dx().mul_monomial(1, 0);
    let fy = f.dy();
    let ideal = GradedIdeal::new(vec![x_fx, fy], w, cap)?;
    let ordinary = GradedIdeal::new(vec![f.dx(), f.dy()], w, cap)?;
    let mu0 = f
        .dy()
        .restrict_to_boundary()
        .iter()
        .position(|c| !c.is_zero())
        .ok_or(Error::MultiplicityNotFinite(cap))?;
    let mu = ideal.dimension();
    let mu1 = ordinary.dimension();
    if mu != mu1 + mu0 {
        return Err(Error::InvariantViolation(format!(
            "mu = {mu} but mu1 + mu0 = {mu1} + {mu0}"
        )));
    }
    Ok(BoundaryGerm {
        f: f.clone(),
        weights: w.clone(),
        mu,
        mu1,
        mu0,
        basis: ideal.basis().to_vec(),
        ideal,
    })
}

/// Ordinary Milnor algebra `O/(f_x, f_y)`.
pub fn milnor_ordinary<K: Scalar>(f: &Polynomial<K>, w: &WeightSystem, cap: i64) -> Result<GradedIdeal<K>> {
    if !f.constant_term().is_zero() {
        return Err(Error::NonzeroAtOrigin);
    }
    if !is_quasihomogeneous(f, w) {
        return Err(Error::NotQuasihomogeneous);
    }
    GradedIdeal::new(vec![f.dx(), f.dy()], w, cap)
}

/// Reduction of `g` modulo `(x f_x, f_y)` onto the germ's basis.
pub fn graded_reduce<K: Scalar>(g: &Polynomial<K>, germ: &BoundaryGerm<K>) -> ReductionCertificate<K> {
    let (c, cof) = germ.ideal.reduce(g);
    let pick = |gen: &Polynomial<K>| {
        germ.ideal
            .generator_index(gen)
            .map(|i| cof[i].clone())
            .unwrap_or_default()
    };
    ReductionCertificate {
        c,
        p: pick(&germ.x_fx()),
        q: pick(&germ.fy()),
    }
}
