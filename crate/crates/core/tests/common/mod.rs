#![allow(dead_code)]

use mkit::scalar::{int, rat};
use mkit::{Form, Monomial, Poly, Rational, SeriesT, WeightSystem};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// The simple boundary singularities with their Milnor numbers.
pub fn simple_germs() -> Vec<(String, Poly, usize)> {
    let mut out = Vec::new();
    for mu in 1..=6u32 {
        out.push((format!("A{mu}"), Poly::from_ints(&[(1, 1, 0), (1, 0, mu + 1)]), mu as usize));
    }
    for mu in 2..=6u32 {
        out.push((format!("B{mu}"), Poly::from_ints(&[(1, mu, 0), (1, 0, 2)]), mu as usize));
    }
    for mu in 2..=6u32 {
        out.push((format!("C{mu}"), Poly::from_ints(&[(1, 1, 1), (1, 0, mu)]), mu as usize));
    }
    out.push(("F4".into(), Poly::from_ints(&[(1, 2, 0), (1, 0, 3)]), 4));
    out
}

/// `p/q` with `|p/q| ≤ bound` and `1 ≤ q ≤ 5`.
pub fn rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    let q = rng.gen_range(1..=5);
    rat(rng.gen_range(-bound * q..=bound * q), q)
}

pub fn nonzero_rational(rng: &mut ChaCha8Rng, bound: i64) -> Rational {
    loop {
        let r = rational(rng, bound);
        if r != int(0) {
            return r;
        }
    }
}

/// Monomials of quasidegree at most `qmax`.
pub fn monomials_up_to(w: &WeightSystem, qmax: i64) -> Vec<Monomial> {
    let cap = w.level_of(&int(qmax));
    (0..=cap).flat_map(|l| w.monomials_at(l)).map(|(i, j)| Monomial::new(i, j)).collect()
}

/// A sparse polynomial with `terms` monomials drawn from `pool`.
pub fn sparse_poly(rng: &mut ChaCha8Rng, pool: &[Monomial], terms: usize, bound: i64) -> Poly {
    let mut p = Poly::zero();
    for _ in 0..terms {
        let m = pool[rng.gen_range(0..pool.len())];
        p.add_term(m, rational(rng, bound));
    }
    p
}

/// Polynomial of total degree at most `deg`.
pub fn dense_poly(rng: &mut ChaCha8Rng, deg: u32, bound: i64) -> Poly {
    let mut p = Poly::zero();
    for d in 0..=deg {
        for i in 0..=d {
            p.add_term(Monomial::new(i, d - i), rational(rng, bound));
        }
    }
    p
}

pub fn series(rng: &mut ChaCha8Rng, order: usize, bound: i64, lead: Rational) -> SeriesT {
    let mut c = vec![lead];
    c.extend((1..=order).map(|_| rational(rng, bound)));
    SeriesT::new(c)
}

/// `Σ c_k f^k`, exact.
pub fn series_of(c: &SeriesT, f: &Poly) -> Poly {
    let mut out = Poly::zero();
    let mut power = Poly::one();
    for k in 0..=c.order() {
        out = &out + &power.scale(&c.coeff(k));
        power = &power * f;
    }
    out
}

/// `df∧dg`, computed independently of the library helper.
pub fn df_dg(f: &Poly, g: &Poly) -> Poly {
    &(&f.dx() * &g.dy()) - &(&f.dy() * &g.dx())
}

pub fn two_form(p: Poly) -> Form {
    Form::two_form(p)
}

pub mod strategy {
    use super::*;
    use mkit::PlaneMap;
    use proptest::prelude::*;

    pub fn rational() -> impl Strategy<Value = Rational> {
        (-12i64..=12, 1i64..=4).prop_map(|(p, q)| rat(p, q))
    }

    pub fn nonzero_rational() -> impl Strategy<Value = Rational> {
        rational().prop_filter("nonzero", |r| *r != int(0))
    }

    /// Up to `terms` monomials with exponents below `deg`.
    pub fn poly(deg: u32, terms: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec((0..deg, 0..deg, rational()), 0..=terms).prop_map(|ts| {
            let mut p = Poly::zero();
            for (i, j, c) in ts {
                p.add_term(Monomial::new(i, j), c);
            }
            p
        })
    }

    /// A polynomial in the ideal `(x^k)`.
    pub fn poly_in_x(k: u32, deg: u32, terms: usize) -> impl Strategy<Value = Poly> {
        poly(deg, terms).prop_map(move |p| p.mul_monomial(k, 0))
    }

    /// A series with `s(0) = lead`.
    pub fn series(order: usize, lead: Rational) -> impl Strategy<Value = SeriesT> {
        prop::collection::vec(rational(), order).prop_map(move |tail| {
            let mut c = vec![lead.clone()];
            c.extend(tail);
            SeriesT::new(c)
        })
    }

    /// Diffeomorphism germ with a small integer linear part, graded by total degree.
    pub fn diffeo(cap: i64) -> impl Strategy<Value = PlaneMap> {
        let linear = prop::array::uniform4(-2i64..=2).prop_filter("invertible", |a| a[0] * a[3] != a[1] * a[2]);
        (linear, poly(3, 4), poly(3, 4)).prop_map(move |(a, nx, ny)| {
            let high = |p: Poly| p.filter(&|m: &Monomial| m.degree() >= 2);
            let fx = &Poly::from_ints(&[(a[0], 1, 0), (a[1], 0, 1)]) + &high(nx);
            let fy = &Poly::from_ints(&[(a[2], 1, 0), (a[3], 0, 1)]) + &high(ny);
            PlaneMap::new(fx, fy, WeightSystem::total_degree(), cap).unwrap()
        })
    }

    /// One of the simple germs with its monomials rescaled by nonzero constants.
    pub fn simple_germ() -> impl Strategy<Value = (String, Poly, usize)> {
        let germs = simple_germs();
        (0..germs.len(), nonzero_rational(), nonzero_rational()).prop_map(move |(k, a, b)| {
            let (name, f, mu) = germs[k].clone();
            let scaled = Poly::from_terms(f.terms().zip([a, b]).map(|((m, c), s)| (*m, c * s)));
            (name, scaled, mu)
        })
    }
}
