//! Acceptance suite: one `PASS` or `FAIL` line per criterion.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use mkit::classifier::{classify, gauge_reduce, ClassTag, ClassificationReport, LagrangianGerm};
use mkit::flux::{check_flux_relation, flux_v, flux_v0, flux_v_series, uniform_grid};
use mkit::form::wedge_df;
use mkit::francoise::{decompose, euler_invert, homotopy_potential, verify_certificate};
use mkit::local::{detect_weights, milnor_boundary};
use mkit::normalizer::{a1_function, build_morse_normalizer, default_pair_cap, solve_vey_ode};
use mkit::scalar::{int, rat};
use mkit::{Form, Monomial, PlaneMap, Poly, SeriesT, WeightSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    for (name, f, mu) in simple_germs() {
        let w = detect_weights(&f).map_err(|e| format!("{name}: {e}"))?;
        let g = milnor_boundary(&f, &w, w.default_cap()).map_err(|e| format!("{name}: {e}"))?;
        ensure(g.mu == mu, || format!("{name}: mu = {}, expected {mu}", g.mu))?;
        ensure(g.mu1 + g.mu0 == g.mu, || format!("{name}: mu1 + mu0 = {} + {}", g.mu1, g.mu0))?;
        ensure(g.basis.len() == mu, || format!("{name}: {} basis monomials", g.basis.len()))?;
    }
    Ok("17 simple germs".into())
}

/// `ω − x Σ c_i(f) e_i dx∧dy − df∧dξ`, recomputed from the result fields.
fn certificate_gap(omega: &Poly, f: &Poly, basis: &[Monomial], c: &[SeriesT], xi: &Poly) -> Poly {
    let mut rhs = df_dg(f, xi);
    for (e, ci) in basis.iter().zip(c) {
        rhs = &rhs + &series_of(ci, f).mul_monomial(e.ex + 1, e.ey);
    }
    omega - &rhs
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut count = 0;
    for (name, f, _) in simple_germs() {
        let w = detect_weights(&f).unwrap();
        let germ = milnor_boundary(&f, &w, w.default_cap()).unwrap();
        let pool: Vec<Monomial> = monomials_up_to(&w, 8).into_iter().filter(|m| m.ex >= 1).collect();
        for _ in 0..20 {
            let g = sparse_poly(&mut rng, &pool, 6, 5);
            let omega = Form::two_form(g.clone());
            let r = decompose(&omega, &germ, 32).map_err(|e| format!("{name}: {e}"))?;
            ensure(r.converged(), || format!("{name}: nonzero residual for {g:?}"))?;
            ensure(verify_certificate(&r, &omega, &f), || format!("{name}: certificate rejected"))?;
            let gap = certificate_gap(&g, &f, &r.basis, &r.c, &r.xi);
            ensure(gap.is_zero(), || format!("{name}: recombination gap {gap:?}"))?;
            count += 1;
        }
    }
    let germ = milnor_boundary(&a1_function(1), &WeightSystem::a1(), 20).unwrap();
    let omega = Form::two_form(Poly::from_ints(&[(1, 1, 0), (1, 1, 1)]));
    let r = decompose(&omega, &germ, 32).map_err(|e| e.to_string())?;
    ensure(r.c[0].same_terms(&SeriesT::from_ints(&[1])), || format!("fixture c = {:?}", r.c))?;
    ensure(r.xi == Poly::term(rat(-1, 4), 2, 0), || format!("fixture xi = {:?}", r.xi))?;
    Ok(format!("{count} random forms and the worked fixture"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let germs = simple_germs();
    for k in 0..50 {
        let (name, f, _) = &germs[k % germs.len()];
        let w = detect_weights(f).unwrap();
        let germ = milnor_boundary(f, &w, w.default_cap()).unwrap();
        let c: Vec<SeriesT> = (0..germ.mu)
            .map(|_| {
                let (n, lead) = (rng.gen_range(0..=3), rational(&mut rng, 5));
                series(&mut rng, n, 5, lead)
            })
            .collect();
        let mut g = Poly::zero();
        for (e, ci) in germ.basis.iter().zip(&c) {
            g = &g + &series_of(ci, f).mul_monomial(e.ex + 1, e.ey);
        }
        let r = decompose(&Form::two_form(g.clone()), &germ, 32).map_err(|e| format!("{name}: {e}"))?;
        let same = |got: &[SeriesT]| got.iter().zip(&c).all(|(a, b)| a.same_terms(b));
        ensure(same(&r.c) && r.xi.is_zero(), || format!("{name}: normal form not fixed"))?;

        let pool: Vec<Monomial> = monomials_up_to(&w, 4).into_iter().filter(|m| m.ex >= 2).collect();
        let shift = sparse_poly(&mut rng, &pool, 3, 5);
        let moved = &g + &df_dg(f, &shift);
        let r = decompose(&Form::two_form(moved), &germ, 32).map_err(|e| format!("{name}: {e}"))?;
        ensure(same(&r.c), || format!("{name}: df∧dg changed the invariants"))?;
        ensure(r.xi == shift, || format!("{name}: potential {:?}, expected {shift:?}", r.xi))?;
    }
    Ok("50 invariant tuples".into())
}

fn criterion_4() -> Outcome {
    let w = solve_vey_ode(&SeriesT::from_ints(&[1, 1])).map_err(|e| e.to_string())?;
    ensure(w.same_terms(&SeriesT::new(vec![int(1), rat(5, 7)])), || format!("w = {w:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a1 = WeightSystem::a1();
    let f = a1_function(1);
    for _ in 0..25 {
        let n = rng.gen_range(1..=8);
        let c = series(&mut rng, n, 3, int(1));
        let cap = default_pair_cap(n);
        let r = build_morse_normalizer(&c, cap).map_err(|e| e.to_string())?;
        let pulled = r.map.pullback(&Form::two_form(Poly::x()), cap).unwrap();
        let expected = series_of(&c, &f).mul_monomial(1, 0).truncate(&a1, cap);
        ensure(pulled.coefficient().unwrap() == &expected, || format!("pullback identity fails for {c:?}"))?;
        let level = cap.min(2 * r.psi.order() as i64 + 1);
        let image = f.compose(&r.map.fx, &r.map.fy).truncate(&a1, level);
        ensure(image == series_of(&r.psi, &f).truncate(&a1, level), || format!("f∘Φ ≠ ψ(f) for {c:?}"))?;
        ensure(r.psi.coeff(0) == int(0) && r.psi.coeff(1) == int(1), || "ψ not normalized".into())?;
    }
    Ok("25 random invariants".into())
}

fn criterion_5() -> Outcome {
    let v0 = flux_v0(1.0f64, 64).map_err(|e| e.to_string())?;
    ensure((v0 - 4.0 / 3.0).abs() < 1e-9, || format!("V0(1) = {v0}"))?;
    for (c, exact) in [(vec![1.0f64], 8.0f64 / 15.0), (vec![1.0, 1.0], 32.0 / 35.0)] {
        let v = flux_v(1.0, &c, 64).map_err(|e| e.to_string())?;
        ensure((v - exact).abs() < 1e-8, || format!("V(1) = {v} for c = {c:?}"))?;
        ensure((flux_v_series(1.0, &c) - exact).abs() < 1e-12, || "series value".into())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = uniform_grid(0.1, 1.0, 10);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let deg = rng.gen_range(0..=4);
        let c: Vec<f64> = (0..=deg).map(|_| rng.gen_range(-2.0..=2.0)).collect();
        let report = check_flux_relation(&c, &grid, 1e-5, 64).map_err(|e| e.to_string())?;
        worst = worst.max(report.max_residual);
        for &t in &grid {
            let gap = (flux_v(t, &c, 64).unwrap() - flux_v_series(t, &c)).abs();
            ensure(gap < 1e-8, || format!("series and quadrature differ by {gap:e} at t = {t}"))?;
        }
    }
    ensure(worst < 1e-6, || format!("max residual {worst:e}"))?;
    Ok(format!("max residual {worst:.1e}"))
}

/// An invertible polynomial map with small coefficients and a quadratic tail.
fn random_diffeo(rng: &mut ChaCha8Rng) -> PlaneMap {
    loop {
        let a: Vec<i64> = (0..4).map(|_| rng.gen_range(-2..=2)).collect();
        if a[0] * a[3] - a[1] * a[2] == 0 {
            continue;
        }
        let quad = |rng: &mut ChaCha8Rng| {
            let mut p = Poly::zero();
            for (i, j) in [(2, 0), (1, 1), (0, 2)] {
                p.add_term(Monomial::new(i, j), rational(rng, 1));
            }
            p
        };
        let fx = &Poly::from_ints(&[(a[0], 1, 0), (a[1], 0, 1)]) + &quad(rng);
        let fy = &Poly::from_ints(&[(a[2], 1, 0), (a[3], 0, 1)]) + &quad(rng);
        return PlaneMap::new(fx, fy, WeightSystem::total_degree(), 0).unwrap();
    }
}

fn same_class(a: &ClassificationReport, b: &ClassificationReport, order: usize) -> bool {
    let cut = |r: &ClassificationReport| r.invariant.as_ref().map(|s| s.with_order(order));
    a.class == b.class && a.sign == b.sign && cut(a) == cut(b)
}

struct Planted {
    germ: LagrangianGerm,
    class: ClassTag,
    sign: Vec<i32>,
    invariant: Option<SeriesT>,
}

fn planted() -> Vec<Planted> {
    let symplectic = Form::one_form(Poly::zero(), Poly::x());
    let martinet = Form::one_form(Poly::zero(), Poly::term(rat(1, 2), 2, 0));
    let germ = |a: &Form, f: Poly| LagrangianGerm::new(a.clone(), f).unwrap();
    let phi = SeriesT::new(vec![int(0), int(2), rat(1, 2), rat(-1, 3)]);
    let psi = SeriesT::new(vec![int(0), int(1), rat(1, 3), rat(-1, 2)]);
    let psi2 = SeriesT::new(vec![int(0), int(2), int(-1), rat(1, 5)]);
    let sq = |sx: i64, sy: i64| Poly::from_ints(&[(sx, 2, 0), (sy, 0, 2)]);
    vec![
        Planted { germ: germ(&symplectic, Poly::x()), class: ClassTag::Lnf0, sign: vec![], invariant: None },
        Planted {
            germ: germ(&symplectic, series_of(&phi, &sq(1, 1))),
            class: ClassTag::Lnf1,
            sign: vec![1, 1],
            invariant: Some(phi.clone()),
        },
        Planted {
            germ: germ(&symplectic, series_of(&phi, &sq(1, -1))),
            class: ClassTag::Lnf1,
            sign: vec![1, -1],
            invariant: Some(phi.clone()),
        },
        Planted { germ: germ(&martinet, Poly::y()), class: ClassTag::Lnf2, sign: vec![-1], invariant: None },
        Planted { germ: germ(&martinet, -&Poly::y()), class: ClassTag::Lnf2, sign: vec![1], invariant: None },
        Planted {
            germ: germ(&martinet, series_of(&psi, &a1_function(1))),
            class: ClassTag::Lnf3,
            sign: vec![1],
            invariant: Some(psi),
        },
        Planted {
            germ: germ(&martinet, series_of(&psi2, &a1_function(-1))),
            class: ClassTag::Lnf3,
            sign: vec![-1],
            invariant: Some(psi2),
        },
    ]
}

fn criterion_6() -> Outcome {
    let order = 6;
    let cap = default_pair_cap(order);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let forms = planted();
    let run = |g: &LagrangianGerm| classify(g, cap, order).map_err(|e| e.to_string());
    let mut pulled_back = 0;
    for class in [ClassTag::Lnf0, ClassTag::Lnf1, ClassTag::Lnf2, ClassTag::Lnf3] {
        let variants: Vec<&Planted> = forms.iter().filter(|p| p.class == class).collect();
        for k in 0..20 {
            let p = variants[k % variants.len()];
            let g = p.germ.pullback(&random_diffeo(&mut rng));
            let r = run(&g)?;
            ensure(r.class == p.class && r.sign == p.sign, || {
                format!("{class}: got {} {:?}, expected {:?}", r.class, r.sign, p.sign)
            })?;
            if let Some(expected) = &p.invariant {
                ensure(r.invariant_exact, || format!("{class}: invariant not exact"))?;
                let got = r.invariant.as_ref().map(|s| s.with_order(order));
                ensure(got.as_ref() == Some(&expected.with_order(order)), || {
                    format!("{class}: invariant {got:?}, expected {expected:?}")
                })?;
            }
            pulled_back += 1;
        }
    }
    for p in &forms {
        let base = run(&p.germ)?;
        for _ in 0..2 {
            let xi = dense_poly(&mut rng, 3, 3);
            let gauged = LagrangianGerm::new(gauge_reduce(&p.germ.alpha, &xi).unwrap(), p.germ.f.clone()).unwrap();
            ensure(same_class(&base, &run(&gauged)?, order), || format!("{}: gauge shift changed the class", p.class))?;
            let lifted = LagrangianGerm::new(p.germ.alpha.clone(), &p.germ.f + &Poly::constant(rational(&mut rng, 5))).unwrap();
            ensure(same_class(&base, &run(&lifted)?, order), || format!("{}: constant shift changed the class", p.class))?;
        }
    }
    Ok(format!("{pulled_back} pullbacks, gauge and constant shifts"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let germs = simple_germs();
    for k in 0..100 {
        let g = dense_poly(&mut rng, 5, 5);
        let dg = Form::Function(g.clone()).exterior_derivative().unwrap();
        ensure(dg.exterior_derivative().unwrap().is_zero(), || "d∘d ≠ 0".into())?;

        let (_, f, _) = &germs[k % germs.len()];
        let w = detect_weights(f).unwrap();
        let theta = Form::two_form(dense_poly(&mut rng, 4, 5));
        let lhs = theta.mul_fn(f);
        let rhs = wedge_df(f, &theta.interior_euler(&w).unwrap()).unwrap();
        ensure(lhs == rhs, || "fθ ≠ df∧(E⌟θ)".into())?;

        let g0 = &g - &Poly::constant(g.constant_term());
        let h = homotopy_potential(&dg, false).map_err(|e| e.to_string())?;
        ensure(h == g0, || "homotopy potential of dg is not g − g(0)".into())?;
        let gx = g.mul_monomial(2, 0);
        let pi = Form::Function(gx.clone()).exterior_derivative().unwrap();
        let h = homotopy_potential(&pi, true).map_err(|e| e.to_string())?;
        ensure(h.in_x_ideal(2) && Form::Function(h).exterior_derivative().unwrap() == pi, || "dh ≠ π".into())?;

        let lambda = rational(&mut rng, 5);
        let omega0 = Form::two_form(Poly::x().scale(&lambda));
        let alpha0 = omega0.interior_euler(&WeightSystem::a1()).unwrap();
        ensure(alpha0.exterior_derivative().unwrap() == omega0.scale(&rat(5, 2)), || "dα₀ ≠ (5/2)ω₀".into())?;
        let cartan = theta.interior_euler(&w).unwrap().exterior_derivative().unwrap();
        ensure(euler_invert(&w, &cartan).unwrap() == theta, || "d(E⌟θ) is not L_E θ".into())?;
    }
    Ok("100 cases per identity".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("Milnor numbers of the simple boundary singularities", criterion_1),
        ("exact decomposition certificates", criterion_2),
        ("uniqueness of the invariants", criterion_3),
        ("ODE solution and Morse normalizer pullback", criterion_4),
        ("flux relation", criterion_5),
        ("classifier robustness", criterion_6),
        ("operator identities", criterion_7),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {secs:.1}s)", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why} ({secs:.1}s)", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
