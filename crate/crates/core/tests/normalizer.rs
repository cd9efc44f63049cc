mod common;

use common::{series_of, strategy};
use mkit::normalizer::{
    a1_function, build_morse_normalizer, default_pair_cap, flatten_martinet_curve, morse_normalizer_signed, normalize_a1_boundary,
    normalize_pair, solve_vey_ode, verify_morse_normalizer,
};
use mkit::scalar::{int, rat};
use mkit::{Form, Monomial, PlaneMap, Poly, SeriesT, WeightSystem};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

fn p(terms: &[(i64, u32, u32)]) -> Poly {
    Poly::from_ints(terms)
}

fn a1() -> WeightSystem {
    WeightSystem::a1()
}

/// `(2/5) k w_k + w_k = c_k` for every stored `k`.
fn solves_ode(w: &SeriesT, c: &SeriesT) -> bool {
    (0..=c.order()).all(|k| w.coeff(k) * (rat(2, 5) * int(k as i64) + int(1)) == c.coeff(k))
}

#[test]
fn vey_ode_examples() {
    assert!(solve_vey_ode(&SeriesT::from_ints(&[1])).unwrap().same_terms(&SeriesT::from_ints(&[1])));
    assert!(solve_vey_ode(&SeriesT::from_ints(&[1, 1])).unwrap().same_terms(&SeriesT::new(vec![int(1), rat(5, 7)])));
    let w = solve_vey_ode(&SeriesT::from_ints(&[1, 0, 1])).unwrap();
    assert!(w.same_terms(&SeriesT::new(vec![int(1), int(0), rat(5, 9)])));
    assert!(solve_vey_ode(&SeriesT::from_ints(&[2, 1])).is_err());
}

#[test]
fn morse_normalizer_examples() {
    let r = build_morse_normalizer(&SeriesT::from_ints(&[1]), 12).unwrap();
    assert!(r.map.is_identity());
    assert!(r.psi.same_terms(&SeriesT::identity(1)));
    let r = build_morse_normalizer(&SeriesT::from_ints(&[1, 1]).with_order(2), 12).unwrap();
    assert!(r.v.same_terms(&SeriesT::new(vec![int(1), rat(2, 7), rat(-3, 49)])));
    assert!(r.psi.same_terms(&SeriesT::new(vec![int(0), int(1), rat(2, 7), rat(-3, 49)])));
}

#[test]
fn flatten_examples() {
    let td = WeightSystem::total_degree();
    assert!(flatten_martinet_curve(&Poly::x(), 6).unwrap().is_identity());
    let g = p(&[(1, 1, 0), (-1, 0, 2)]);
    assert_eq!(flatten_martinet_curve(&g, 6).unwrap(), PlaneMap::new(g.clone(), Poly::y(), td.clone(), 6).unwrap());
    let g = p(&[(1, 1, 0), (1, 1, 1)]);
    assert_eq!(flatten_martinet_curve(&g, 6).unwrap(), PlaneMap::new(g, Poly::y(), td, 6).unwrap());
    assert!(flatten_martinet_curve(&p(&[(1, 1, 1)]), 6).is_err());
}

#[test]
fn a1_boundary_examples() {
    let cap = 10;
    let r = normalize_a1_boundary(&a1_function(1), cap).unwrap();
    assert!(r.map.is_identity() && r.sign == 1 && r.scale.is_one());
    let r = normalize_a1_boundary(&p(&[(2, 1, 0), (1, 0, 2)]), cap).unwrap();
    assert_eq!((r.map.fx, r.map.fy), (Poly::term(rat(1, 2), 1, 0), Poly::y()));
    let r = normalize_a1_boundary(&p(&[(1, 1, 0), (1, 0, 2), (1, 1, 1)]), cap).unwrap();
    let w = a1();
    let geometric = Poly::from_terms((0..=cap as u32).map(|k| (Monomial::new(1, k), int(if k % 2 == 0 { 1 } else { -1 }))));
    assert_eq!(r.map.fx, geometric.truncate(&w, cap + w.level_x()));
    assert_eq!(r.map.fy, Poly::y());
}

#[test]
fn pair_examples() {
    let order = 3;
    let cap = default_pair_cap(order);
    let f = a1_function(1);
    let r = normalize_pair(&Form::two_form(Poly::x()), &f, cap, order).unwrap();
    assert!(r.map.is_identity());
    assert!(r.psi.same_terms(&SeriesT::identity(1)));

    let omega = Form::two_form(p(&[(1, 1, 0), (1, 2, 0), (1, 1, 2)]));
    let r = normalize_pair(&omega, &f, cap, order).unwrap();
    let morse = build_morse_normalizer(&SeriesT::from_ints(&[1, 1]).with_order(order), cap).unwrap();
    assert!(r.psi.with_order(order).same_terms(&morse.psi.revert().unwrap().with_order(order)));
    assert!(r.kappa.is_one() && r.scale.is_one());

    let f = p(&[(2, 1, 0), (2, 0, 2)]);
    let r = normalize_pair(&Form::two_form(Poly::x()), &f, cap, order).unwrap();
    // Total degree `d` sees `ψ` through `t^d` only.
    let (w, level) = (&r.map.grading, r.map.cap.min(r.psi.order() as i64));
    let rhs = series_of(&r.psi, &a1_function(r.sign)).scale(&r.scale).truncate(w, level);
    assert_eq!(r.map.pull_function(&f, level), rhs);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    #[test]
    fn ode_solution_is_exact(c in strategy::series(12, int(1))) {
        let w = solve_vey_ode(&c).unwrap();
        prop_assert!(solves_ode(&w, &c));
    }

    #[test]
    fn morse_normalizer_pulls_back_exactly(n in 1usize..=8, c in strategy::series(8, int(1)), negative in any::<bool>()) {
        let c = c.with_order(n);
        let sign = if negative { -1 } else { 1 };
        let cap = default_pair_cap(n);
        let r = morse_normalizer_signed(&c, sign, cap).unwrap();
        let w = a1();
        let f = a1_function(sign);
        let pulled = r.map.pullback(&Form::two_form(Poly::x()), cap).unwrap();
        let expected = series_of(&c, &f).mul_monomial(1, 0).truncate(&w, cap);
        prop_assert_eq!(pulled.coefficient().unwrap(), &expected);
        let level = cap.min(2 * r.psi.order() as i64 + 1);
        prop_assert_eq!(r.map.pull_function(&f, level), series_of(&r.psi, &f).truncate(&w, level));
        prop_assert!(r.map.is_boundary_preserving());
        prop_assert!(r.psi.coeff(0).is_zero() && r.psi.coeff(1).is_one());
        prop_assert!(solves_ode(&r.w, &c));
        // v^{5/2} = w, checked as v^5 = w^2.
        let v5 = (0..5).fold(SeriesT::one(n), |acc, _| acc.mul(&r.v));
        prop_assert!(v5.same_terms(&r.w.mul(&r.w)));
        prop_assert!(verify_morse_normalizer(&r).is_ok());
    }

    #[test]
    fn a1_boundary_normal_form(
        a in strategy::nonzero_rational(),
        b in strategy::nonzero_rational(),
        tail in strategy::poly(4, 6),
    ) {
        let w = a1();
        let cap = 10;
        let tail = tail.filter(&|m: &Monomial| w.level(m.ex, m.ey) >= 3);
        let f = &Poly::from_terms([(Monomial::new(1, 0), a), (Monomial::new(0, 2), b.clone())]) + &tail;
        let r = normalize_a1_boundary(&f, cap).unwrap();
        prop_assert_eq!(r.sign, if b.is_positive() { 1 } else { -1 });
        prop_assert!(r.map.is_boundary_preserving());
        prop_assert_eq!(r.map.pull_function(&f, cap), a1_function(r.sign).scale(&r.scale).truncate(&w, cap));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pair_normal_form(
        unit in strategy::poly(3, 3),
        a in strategy::nonzero_rational(),
        b in strategy::nonzero_rational(),
        tail in strategy::poly(3, 3),
    ) {
        let order = 2;
        let cap = default_pair_cap(order);
        let unit = &Poly::one() + &unit.filter(&|m: &Monomial| m.degree() > 0);
        let omega = Form::two_form(unit.mul_monomial(1, 0));
        let tail = tail.filter(&|m: &Monomial| m.degree() >= 2 && *m != Monomial::new(0, 2));
        let f = &Poly::from_terms([(Monomial::new(1, 0), a), (Monomial::new(0, 2), b)]) + &tail;
        let r = normalize_pair(&omega, &f, cap, order).unwrap();
        let (map, w) = (&r.map, &r.map.grading);
        prop_assert!(r.psi.coeff(0).is_zero() && r.psi.coeff(1).is_one());
        let pulled = map.pullback(&omega, map.cap).unwrap();
        prop_assert_eq!(pulled.coefficient().unwrap(), &Poly::x().scale(&r.kappa).truncate(w, map.cap));
        let level = map.cap.min(r.psi.order() as i64);
        let rhs = series_of(&r.psi, &a1_function(r.sign)).scale(&r.scale).truncate(w, level);
        prop_assert_eq!(map.pull_function(&f, level), rhs);
        prop_assert!(r.flat_map.is_boundary_preserving());
    }
}
