//! Coordinate normalizations for Martinet pairs `(ω, f)` of type A₁ and for
//! the ordinary Morse case.
//!
//! Every map built here is checked by pulling back before it is returned.
//! Normalized invariants are reported as `ψ̂` with `ψ̂'(0) = 1` together with
//! the two scale constants needed to recover the real invariant.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::form::{wedge_df_dg, DifferentialForm};
use crate::francoise::decompose;
use crate::local::milnor_boundary;
use crate::map::PlaneMap;
use crate::poly::{Monomial, Polynomial};
use crate::scalar::{int, rat, root_exact, Rational, Scalar};
use crate::series::Series;
use crate::weights::WeightSystem;

type Poly = Polynomial<Rational>;
type Map = PlaneMap<Rational>;
type S = Series<Rational>;
type Form = DifferentialForm<Rational>;

/// Output of [`build_morse_normalizer`].
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizationResult {
    /// `Φ = (x v(f), y √v(f))`.
    pub map: Map,
    /// `ψ = t v`.
    pub psi: S,
    pub w: S,
    pub v: S,
    pub c: S,
    pub cap: i64,
    /// `±` in `f = x ± y²`.
    pub sign: i32,
}

/// `(2/5) t w' + w = c`, `w(0) = 1`: `w_k = 5 c_k / (5 + 2k)`.
pub fn solve_vey_ode(c: &S) -> Result<S> {
    if !c.coeff(0).is_one() {
        return Err(Error::InvariantNotNormalized);
    }
    Ok(S::new(
        c.coeffs()
            .iter()
            .enumerate()
            .map(|(k, ck)| ck * int(5) / int(5 + 2 * k as i64))
            .collect(),
    ))
}

/// `x ± y²`.
pub fn a1_function(sign: i32) -> Poly {
    Poly::from_ints(&[(1, 1, 0), (sign as i64, 0, 2)])
}

/// The map with `Φ*(x dx∧dy) = x c(f) dx∧dy` and `f∘Φ = ψ(f)` for
/// `f = x + y²`, both checked through `cap`.
pub fn build_morse_normalizer(c: &S, cap: i64) -> Result<NormalizationResult> {
    morse_normalizer_signed(c, 1, cap)
}

/// As [`build_morse_normalizer`] for `f = x + sign·y²`.
pub fn morse_normalizer_signed(c: &S, sign: i32, cap: i64) -> Result<NormalizationResult> {
    if cap < 0 {
        return Err(Error::NegativeCap(cap));
    }
    let w = WeightSystem::a1();
    let n = c.order();
    // x·v(f) must be exact through cap + 2, so v is needed to order cap/2 + 1.
    let full = c.with_order(n.max(cap as usize / 2 + 1));
    let w_full = solve_vey_ode(&full)?;
    let v_full = w_full.power(&rat(2, 5))?;
    let root_v = v_full.power(&rat(1, 2))?;
    let f = a1_function(sign);
    let fx = v_full.compose_poly(&f, &w, cap).mul_monomial(1, 0);
    let fy = root_v.compose_poly(&f, &w, cap).mul_monomial(0, 1);
    let map = PlaneMap::new(fx, fy, w.clone(), cap)?;

    let pulled = map.pullback(&Form::two_form(Poly::x()), cap)?;
    let expected = full.compose_poly(&f, &w, cap).mul_monomial(1, 0).truncate(&w, cap);
    if pulled.coefficient()? != &expected {
        return Err(Error::InvariantViolation("Φ*(x dx∧dy) ≠ x c(f) dx∧dy".into()));
    }
    let psi_full = v_full.shift();
    if map.pull_function(&f, cap) != psi_full.compose_poly(&f, &w, cap) {
        return Err(Error::InvariantViolation("f∘Φ ≠ ψ(f)".into()));
    }
    Ok(NormalizationResult {
        map,
        psi: v_full.with_order(n).shift(),
        w: w_full.with_order(n),
        v: v_full.with_order(n),
        c: c.clone(),
        cap,
        sign,
    })
}

/// Coordinates `(g, y)`, or `(g, x)` when `g_x(0) = 0`, in which the curve
/// `{g = 0}` becomes `{x = 0}`. Graded by total degree.
pub fn flatten_martinet_curve(g: &Poly, cap: i64) -> Result<Map> {
    if !g.constant_term().is_zero() {
        return Err(Error::NotMartinetPoint);
    }
    let second = if !g.coeff(1, 0).is_zero() {
        Poly::y()
    } else if !g.coeff(0, 1).is_zero() {
        Poly::x()
    } else {
        return Err(Error::NotMartinetPoint);
    };
    PlaneMap::new(g.clone(), second, WeightSystem::total_degree(), cap)
}

/// Output of [`normalize_a1_boundary`]: `f∘Φ = scale·(x + sign·y²)`.
#[derive(Clone, Debug, PartialEq)]
pub struct A1Boundary {
    pub map: Map,
    pub sign: i32,
    /// `1` when `|∂²_y f(0,0)/2|` is a rational square; that value otherwise.
    pub scale: Rational,
}

/// Boundary-preserving `Φ` with `f∘Φ = ℓ(x ± y²)` through `cap` (A₁ grading).
pub fn normalize_a1_boundary(f: &Poly, cap: i64) -> Result<A1Boundary> {
    if cap < 0 {
        return Err(Error::NegativeCap(cap));
    }
    if !f.constant_term().is_zero() {
        return Err(Error::NonzeroAtOrigin);
    }
    let w = WeightSystem::a1();
    let a = f.coeff(1, 0);
    if a.is_zero() {
        return Err(Error::Genericity("f_x(0) = 0, so f is not regular at the origin".into()));
    }
    let h = f.restrict_to_boundary();
    let hk = |k: usize| h.get(k).cloned().unwrap_or_else(Rational::zero);
    if !hk(1).is_zero() {
        return Err(Error::Genericity("f restricted to H has no critical point at 0".into()));
    }
    let a2 = hk(2);
    if a2.is_zero() {
        return Err(Error::Genericity("critical point of f restricted to H is degenerate".into()));
    }
    let sign = a2.sign();
    let (scale, gamma) = match a2.abs().sqrt_exact() {
        Some(beta) => (Rational::one(), beta.recip()),
        None => (a2.abs(), Rational::one()),
    };

    // f(0, y) = a2 z(y)², z = y √(1 + ρ); then Y = z⁻¹(γ y).
    let ydeg = cap as usize + 1;
    let rho = S::new((0..=ydeg).map(|k| hk(k + 2) / &a2).collect());
    let z = rho.power(&rat(1, 2))?.shift();
    let z_inv = z.revert()?;
    let big_y = Poly::from_terms(
        (1..=ydeg).map(|k| (Monomial::new(0, k as u32), z_inv.coeff(k) * num_traits::pow(gamma.clone(), k))),
    );

    let target = a1_function(sign).scale(&scale);
    let cx = cap + w.level_x();
    // Newton on f̃(X, y) = target with f̃ = f(x, Y(y)); the correct level doubles.
    let ft = f.compose_truncated(&Poly::x(), &big_y, &w, cx);
    let ftx = ft.dx();
    let mut big_x = Poly::x().scale(&(&scale / &a));
    let mut level = w.level_x();
    while level < cx {
        level = (2 * level).min(cx);
        let err = (&target - &ft.compose_truncated(&big_x, &Poly::y(), &w, level)).truncate(&w, level);
        let slope = unit_inverse(&ftx.compose_truncated(&big_x, &Poly::y(), &w, level), &w, level);
        big_x = (&big_x + &err.mul_truncated(&slope, &w, level)).truncate(&w, level);
    }
    let map = PlaneMap::new(big_x, big_y, w.clone(), cap)?;
    if !map.is_boundary_preserving() || map.pull_function(f, cap) != target.truncate(&w, cap) {
        return Err(Error::InvariantViolation("f∘Φ ≠ ℓ(x ± y²)".into()));
    }
    Ok(A1Boundary { map, sign, scale })
}

/// `1/u` through `cap` for `u(0) ≠ 0`, by Newton steps `r ← r(2 − u r)`
/// that double the correct level.
fn unit_inverse(u: &Poly, w: &WeightSystem, cap: i64) -> Poly {
    let mut r = Poly::constant(u.constant_term().recip());
    let mut level = 0;
    while level < cap {
        level = (2 * level + 1).min(cap);
        let e = (&Poly::one() - &u.mul_truncated(&r, w, level)).truncate(w, level);
        r = (&r + &r.mul_truncated(&e, w, level)).truncate(w, level);
    }
    r
}

/// `Γ` preserving `f = x + sign·y²` with
/// `Γ*(x C(f) dx∧dy) = x C(f) dx∧dy + df∧dξ` through `cap`, for `ξ ∈ (x²)`.
///
/// `Γ = (f − sign·Y², Y)` with `Y = y + xZ` and
/// `Z (1 − sign·y Z − sign·x Z²/3) = ξ / (x² C(f))`; `ξ` must be exact
/// through level `cap + 3`.
pub fn moser_correction(c: &S, xi: &Poly, sign: i32, cap: i64) -> Result<Map> {
    let w = WeightSystem::a1();
    let f = a1_function(sign);
    let kappa = c.coeff(0);
    if kappa.is_zero() {
        return Err(Error::NotMartinetPoint);
    }
    if !xi.in_x_ideal(2) {
        return Err(Error::Boundary("potential is not in (x²)".into()));
    }
    let zcap = cap;
    let c_f = c.compose_poly(&f, &w, zcap);
    let eta = xi.div_x_pow(2).mul_truncated(&unit_inverse(&c_f, &w, zcap), &w, zcap);
    // Z = η + sign·y Z² + sign·x Z³/3; each step gains a level.
    let s = Rational::from_integer(sign.into());
    let third = rat(sign as i64, 3);
    let start = eta.min_level(&w).unwrap_or(zcap);
    let mut z = eta.clone();
    for level in start + 1..=zcap {
        let zz = z.mul_truncated(&z, &w, level);
        let zzz = zz.mul_truncated(&z, &w, level);
        z = (&(&eta + &zz.mul_monomial(0, 1).scale(&s)) + &zzz.mul_monomial(1, 0).scale(&third)).truncate(&w, level);
    }
    let cy = cap + w.level_y();
    let cx = cap + w.level_x();
    let big_y = (&Poly::y() + &z.mul_monomial(1, 0)).truncate(&w, cy);
    let big_x = (&f - &big_y.mul_truncated(&big_y, &w, cx).scale(&s)).truncate(&w, cx);
    let gamma = PlaneMap::new(big_x, big_y, w.clone(), cap)?;

    // f∘Γ = f, so Γ*(x C(f) dx∧dy) = X C(f) det DΓ.
    let base = c_f.mul_monomial(1, 0);
    let pulled = gamma.fx.mul_truncated(&c_f, &w, cap).mul_truncated(&gamma.jacobian(cap), &w, cap);
    let expected = (&base + &wedge_df_dg(&f, xi)).truncate(&w, cap);
    if pulled != expected {
        return Err(Error::InvariantViolation("Γ*(x C(f) dx∧dy) ≠ ω".into()));
    }
    Ok(gamma)
}

/// Inverse of the map `(x v(f), y √v(f))` with `f = x + sign·y²`:
/// `(x u(f), y √u(f))` with `u = 1/(v∘φ)` and `φ` the reversion of `t v`.
/// `v` must be known to order `cap/2 + 1`.
pub fn invert_morse_normalizer(v: &S, sign: i32, cap: i64) -> Result<Map> {
    let w = WeightSystem::a1();
    let u = morse_inverse_factor(v, cap)?;
    let root_u = u.power(&rat(1, 2))?;
    let f = a1_function(sign);
    PlaneMap::new(
        u.compose_poly(&f, &w, cap).mul_monomial(1, 0),
        root_u.compose_poly(&f, &w, cap).mul_monomial(0, 1),
        w,
        cap,
    )
}

/// `u = 1/(v∘φ)` with `φ` the reversion of `t v`, to order `cap/2 + 1`.
fn morse_inverse_factor(v: &S, cap: i64) -> Result<S> {
    let n = cap as usize / 2 + 1;
    if v.order() < n {
        return Err(Error::NotConverged(cap));
    }
    let v = v.with_order(n);
    let phi = v.shift().revert()?.with_order(n);
    v.compose(&phi)?.power(&rat(-1, 1))
}

/// `p(x u(f), y √u(f))` through `level` for `u(0) = 1`, `f = x + sign·y²`.
/// The A₁ level `k` part of `p` picks up the factor `u(f)^{k/2}`.
fn compose_morse_inverse(p: &Poly, u: &S, sign: i32, level: i64) -> Result<Poly> {
    let w = WeightSystem::a1();
    let f = a1_function(sign);
    let mut parts: BTreeMap<i64, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let k = w.level(m.ex, m.ey);
        if k <= level {
            parts.entry(k).or_insert_with(Poly::zero).add_term(*m, c.clone());
        }
    }
    let mut out = Poly::zero();
    for (k, part) in parts {
        let rest = level - k;
        let factor = u.with_order(rest as usize / 2).power(&rat(k, 2))?;
        out = &out + &part.mul_truncated(&factor.compose_poly(&f, &w, rest), &w, level);
    }
    Ok(out)
}

/// Inverse of `Γ = (f − sign·Y², Y)`, `Y = y + x Z`. In the coordinates
/// `(F, y)`, `F = f`, the map is `(F, Ỹ(F, y))`; its inverse `(F, η)` solves
/// `Ỹ(F, η) = y` by Newton steps that double the correct level.
fn invert_moser(gamma: &Map, sign: i32) -> Result<Map> {
    let w = WeightSystem::a1();
    let cap = gamma.cap;
    let (cx, cy) = (cap + w.level_x(), cap + w.level_y());
    let f = a1_function(sign);
    let s = Rational::from_integer(sign.into());
    let (x, y) = (Poly::x(), Poly::y());
    let x_of_f = &x - &y.mul_monomial(0, 1).scale(&s);
    let yt = gamma.fy.compose_truncated(&x_of_f, &y, &w, cy);
    let yt_y = yt.dy();
    let mut eta = y.clone();
    let mut level = w.level_y();
    while level < cy {
        level = (2 * level + 1).min(cy);
        let err = (&yt.compose_truncated(&x, &eta, &w, level) - &y).truncate(&w, level);
        let slope = unit_inverse(&yt_y.compose_truncated(&x, &eta, &w, level), &w, level);
        eta = (&eta - &err.mul_truncated(&slope, &w, level)).truncate(&w, level);
    }
    let eta = eta.compose_truncated(&f, &y, &w, cy);
    let fx = (&f - &eta.mul_truncated(&eta, &w, cx).scale(&s)).truncate(&w, cx);
    PlaneMap::new(fx, eta, w, cap)
}

/// Result of [`normalize_pair`].
///
/// `Φ*ω = κ x dx∧dy` and `f∘Φ = ℓ ψ̂(x ± y²)`. The real invariant of the
/// pair (with `ω` rescaled to `x dx∧dy`) is `ψ(t) = ℓ ψ̂(|κ|^{-2/5} t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairNormalization {
    /// Composite map in the original coordinates, graded by total degree.
    pub map: Map,
    /// Flattening `{g = 0} → {x = 0}` (total degree).
    pub flattening: Map,
    /// Normalizer after flattening (A₁ grading, through `cap`).
    pub flat_map: Map,
    pub psi: S,
    pub kappa: Rational,
    pub scale: Rational,
    pub sign: i32,
    /// Invariant `c(t)` of the flattened, A₁-normalized pair.
    pub c: S,
    pub morse: NormalizationResult,
    pub cap: i64,
}

/// `ψ(t) = ℓ ψ̂(|κ|^{-2/5} t)` when `|κ|^{-2/5}` is rational.
pub fn martinet_invariant(psi_hat: &S, kappa: &Rational, scale: &Rational) -> Option<S> {
    let alpha = root_exact(&(kappa * kappa).recip(), 5)?;
    Some(scaled_series(psi_hat, scale, &alpha))
}

impl PairNormalization {
    /// The real invariant `ψ`, when its coefficients are rational.
    pub fn invariant(&self) -> Option<S> {
        martinet_invariant(&self.psi, &self.kappa, &self.scale)
    }

    /// The real invariant `ψ` in floating point.
    pub fn invariant_f64(&self) -> Vec<f64> {
        let alpha = (self.kappa.to_f64().abs()).powf(-0.4);
        let l = self.scale.to_f64();
        self.psi
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, p)| l * p.to_f64() * alpha.powi(k as i32))
            .collect()
    }
}

/// `t ↦ scale · s(alpha t)`.
pub fn scaled_series(s: &S, scale: &Rational, alpha: &Rational) -> S {
    S::new(
        s.coeffs()
            .iter()
            .enumerate()
            .map(|(k, p)| scale * p * num_traits::pow(alpha.clone(), k))
            .collect(),
    )
}

/// Default cap for a series order: the level of quasidegree `order + 4`.
pub fn default_pair_cap(order: usize) -> i64 {
    2 * (order as i64 + 4)
}

/// Normalizes a Martinet 2-form `ω = g dx∧dy` and an A₁ boundary function
/// `f` (the restriction of `f` to `{g = 0}` Morse at 0).
pub fn normalize_pair(omega: &Form, f: &Poly, cap: i64, order: usize) -> Result<PairNormalization> {
    if cap < 0 {
        return Err(Error::NegativeCap(cap));
    }
    omega.expect_degree(2)?;
    let a1 = WeightSystem::a1();
    let td = WeightSystem::total_degree();
    let inner = cap + 4;
    let deg = inner + 2;
    let f = f - &Poly::constant(f.constant_term());

    let (phi1, omega1, f1) = (|| -> Result<_> {
        let flat = flatten_martinet_curve(omega.coefficient()?, deg)?;
        let phi1 = flat.invert(deg)?;
        let omega1 = phi1.pullback(omega, deg)?.truncate(&a1, inner);
        let f1 = phi1.pull_function(&f, deg);
        Ok((phi1, omega1, f1))
    })()
    .map_err(Error::at("flatten"))?;

    let a1n = normalize_a1_boundary(&f1, inner).map_err(Error::at("boundary normal form"))?;
    let sign = a1n.sign;
    let f0 = a1_function(sign);
    let omega2 = a1n.map.pullback(&omega1, inner).map_err(Error::at("boundary normal form"))?;

    let decomposition = (|| -> Result<_> {
        let germ = milnor_boundary(&f0, &a1, a1.default_cap())?;
        let r = decompose(&omega2, &germ, inner as usize + 2)?;
        if !r.converged() {
            return Err(Error::InvariantViolation("decomposition did not terminate".into()));
        }
        Ok(r)
    })()
    .map_err(Error::at("decompose"))?;
    let series_order = (inner as usize / 2 + 1).max(order);
    let c = decomposition.c[0].with_order(series_order);
    let kappa = c.coeff(0);
    if kappa.is_zero() {
        return Err(Error::Stage {
            stage: "decompose",
            source: Box::new(Error::NotMartinetPoint),
        });
    }

    let gamma = moser_correction(&c, &decomposition.xi, sign, cap).map_err(Error::at("moser"))?;
    let c_hat = c.scale(&kappa.recip());
    let morse = morse_normalizer_signed(&c_hat, sign, cap).map_err(Error::at("vey"))?;
    let psi_hat = morse.v.shift().revert().map_err(Error::at("vey"))?;

    let flat_map = (|| -> Result<_> {
        let gamma_inv = invert_moser(&gamma, sign)?;
        let outer = a1n.map.regrade(a1.clone(), cap).compose(&gamma_inv);
        let u = morse_inverse_factor(&morse.v, cap)?;
        PlaneMap::new(
            compose_morse_inverse(&outer.fx, &u, sign, cap + a1.level_x())?,
            compose_morse_inverse(&outer.fy, &u, sign, cap + a1.level_y())?,
            a1.clone(),
            cap,
        )
    })()
    .map_err(Error::at("compose"))?;

    let ell = &a1n.scale;
    check_pair_identities(&flat_map, &omega1, &f1, &kappa, ell, &psi_hat, sign, cap).map_err(Error::at("verify"))?;

    // Back in the original coordinates, total degree d has A₁ level ≤ 2d.
    let dcap = ((cap + 1) / 2 - 1).max(0);
    let map = phi1.regrade(td.clone(), dcap).compose(&flat_map.regrade(td.clone(), dcap));
    check_pair_identities(&map, omega, &f, &kappa, ell, &psi_hat, sign, dcap).map_err(Error::at("verify"))?;

    Ok(PairNormalization {
        map,
        flattening: phi1.regrade(td, dcap),
        flat_map,
        psi: psi_hat.with_order(order + 1),
        kappa,
        scale: a1n.scale,
        sign,
        c: c.with_order(order),
        morse: NormalizationResult {
            psi: morse.psi.with_order(order + 1),
            w: morse.w.with_order(order),
            v: morse.v.with_order(order),
            c: c_hat.with_order(order),
            ..morse
        },
        cap,
    })
}

/// `Φ*ω = κ x dx∧dy` and `f∘Φ = ℓ ψ(x ± y²)` through `level` in the
/// grading of `map`.
#[allow(clippy::too_many_arguments)]
pub fn check_pair_identities(
    map: &Map,
    omega: &Form,
    f: &Poly,
    kappa: &Rational,
    scale: &Rational,
    psi: &S,
    sign: i32,
    level: i64,
) -> Result<()> {
    let w = &map.grading;
    let pulled = map.pullback(omega, level)?;
    let expected = Poly::x().scale(kappa).truncate(w, level);
    if pulled.coefficient()? != &expected {
        return Err(Error::InvariantViolation("Φ*ω ≠ κ x dx∧dy".into()));
    }
    let lhs = map.pull_function(&(f - &Poly::constant(f.constant_term())), level);
    let rhs = psi.compose_poly(&a1_function(sign), w, level).scale(scale);
    if lhs != rhs {
        return Err(Error::InvariantViolation("f∘Φ ≠ ℓ ψ(x ± y²)".into()));
    }
    Ok(())
}

/// Rechecks a [`NormalizationResult`] from its stored fields: the ODE,
/// `ψ = t v`, `v^{5/2} = w`, and both pullback identities as far as the
/// stored series determine them.
pub fn verify_morse_normalizer(r: &NormalizationResult) -> Result<()> {
    let n = r.w.order();
    let two_fifths = rat(2, 5);
    let t_dw = r.w.derivative().shift().with_order(n);
    let lhs = t_dw.scale(&two_fifths).add(&r.w);
    if !lhs.same_terms(&r.c.with_order(n)) {
        return Err(Error::InvariantViolation("(2/5) t w′ + w ≠ c".into()));
    }
    if !r.w.coeff(0).is_one() || !r.v.power(&rat(5, 2))?.same_terms(&r.w.with_order(r.v.order())) {
        return Err(Error::InvariantViolation("v^{5/2} ≠ w".into()));
    }
    if !r.psi.same_terms(&r.v.shift()) {
        return Err(Error::InvariantViolation("ψ ≠ t v".into()));
    }
    let w = WeightSystem::a1();
    let f = a1_function(r.sign);
    let pulled = r.map.pullback(&Form::two_form(Poly::x()), r.cap)?;
    let expected = r.c.compose_poly(&f, &w, r.cap).mul_monomial(1, 0).truncate(&w, r.cap);
    if pulled.coefficient()? != &expected {
        return Err(Error::InvariantViolation("Φ*(x dx∧dy) ≠ x c(f) dx∧dy".into()));
    }
    let level = r.cap.min(2 * r.psi.order() as i64 + 1);
    if r.map.pull_function(&f, level) != r.psi.compose_poly(&f, &w, level) {
        return Err(Error::InvariantViolation("f∘Φ ≠ ψ(f)".into()));
    }
    Ok(())
}

/// Output of [`morse_reduce`]: `f∘Φ = a x² + b y²` through `cap`.
#[derive(Clone, Debug, PartialEq)]
pub struct MorseReduction {
    pub map: Map,
    pub a: Rational,
    pub b: Rational,
}

impl MorseReduction {
    pub fn quadratic(&self) -> Poly {
        Poly::from_terms([
            (Monomial::new(2, 0), self.a.clone()),
            (Monomial::new(0, 2), self.b.clone()),
        ])
    }
}

fn linear_map(fx: Poly, fy: Poly) -> Result<Map> {
    PlaneMap::new(fx, fy, WeightSystem::morse(), 1)
}

/// Reduces a Morse function to `a x² + b y²` with rational `a, b`, graded by
/// total degree.
pub fn morse_reduce(f: &Poly, cap: i64) -> Result<MorseReduction> {
    if cap < 2 {
        return Err(Error::NegativeCap(cap));
    }
    let w = WeightSystem::morse();
    let f = f - &Poly::constant(f.constant_term());
    if !f.coeff(1, 0).is_zero() || !f.coeff(0, 1).is_zero() {
        return Err(Error::Genericity("df(0) ≠ 0, so the origin is not critical".into()));
    }
    let quad = |g: &Poly| (g.coeff(2, 0), g.coeff(1, 1), g.coeff(0, 2));
    let (p, q, r) = quad(&f);
    if (int(4) * &p * &r - &q * &q).is_zero() {
        return Err(Error::Genericity("Hessian of f is degenerate".into()));
    }

    // Unimodular substitutions diagonalizing the quadratic part.
    let mut lin = linear_map(Poly::x(), Poly::y())?;
    for _ in 0..3 {
        let g = lin.pull_function(&f, 2);
        let (p, q, r) = quad(&g);
        if q.is_zero() {
            break;
        }
        let step = if !p.is_zero() {
            let k = &q / (int(2) * &p);
            linear_map(&Poly::x() - &Poly::y().scale(&k), Poly::y())?
        } else if !r.is_zero() {
            let k = &q / (int(2) * &r);
            linear_map(Poly::x(), &Poly::y() - &Poly::x().scale(&k))?
        } else {
            linear_map(&Poly::x() + &Poly::y(), Poly::y())?
        };
        lin = lin.compose(&step);
    }
    let lin = PlaneMap { cap, ..lin };
    let f1 = f.compose(&lin.fx, &lin.fy).truncate(&w, cap + 2);
    let (a, q, b) = quad(&f1);
    debug_assert!(q.is_zero());

    // x*(y) with f1_x(x*, y) = 0.
    let ycap = cap + 1;
    let f1x = f1.dx();
    let two_a = int(2) * &a;
    let mut xs = Poly::zero();
    let mut converged = false;
    for _ in 0..(ycap + 4) {
        let err = f1x.compose_truncated(&xs, &Poly::y(), &w, ycap);
        if err.is_zero() {
            converged = true;
            break;
        }
        xs = (&xs - &err.scale(&two_a.recip())).truncate(&w, ycap);
    }
    if !converged {
        return Err(Error::NotConverged(cap));
    }

    // g(u, y) = f1(u + x*, y) = h(y) + u² K(u, y).
    let g = f1.compose_truncated(&(&Poly::x() + &xs), &Poly::y(), &w, cap + 2);
    let h: Vec<Rational> = g.restrict_to_boundary();
    let k_poly = Poly::from_terms(g.terms().filter(|(m, _)| m.ex >= 2).map(|(m, c)| (*m, c.clone()))).div_x_pow(2);
    let eps = &k_poly.scale(&a.recip()) - &Poly::one();
    let sqrt_series = S::from_ints(&[1, 1]).with_order(cap as usize + 1).power(&rat(1, 2))?;
    let u_new = sqrt_series.compose_poly(&eps, &w, cap).mul_monomial(1, 0);
    let hk = |k: usize| h.get(k).cloned().unwrap_or_else(Rational::zero);
    let hy = S::new((0..=cap as usize).map(|k| hk(k + 2) / &b).collect()).power(&rat(1, 2))?;
    let v_new = Poly::from_terms((0..=cap as usize).map(|k| (Monomial::new(0, k as u32 + 1), hy.coeff(k))));
    let zeta = PlaneMap::new(u_new, v_new, w.clone(), cap)?;
    let shift = PlaneMap::new(&Poly::x() + &xs, Poly::y(), w.clone(), cap)?;
    let map = lin.compose(&shift).compose(&zeta.invert(cap)?);

    let out = MorseReduction { map, a, b };
    if out.map.pull_function(&f, cap) != out.quadratic().truncate(&w, cap) {
        return Err(Error::InvariantViolation("f∘Φ ≠ a x² + b y²".into()));
    }
    Ok(out)
}

/// `Φ = (x √v(f), y √v(f))` for `f = a x² + b y²`, with `φ = t v = ∫ c`,
/// so that `Φ*(dx∧dy) = c(f) dx∧dy` and `f∘Φ = φ(f)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrdinaryNormalization {
    pub map: Map,
    pub phi: S,
}

pub fn build_ordinary_normalizer(c: &S, f0: &Poly, cap: i64) -> Result<OrdinaryNormalization> {
    if !c.coeff(0).is_one() {
        return Err(Error::InvariantNotNormalized);
    }
    let w = WeightSystem::morse();
    let full = c.with_order(c.order().max(cap as usize / 2 + 1));
    let phi_full = full.integral();
    let v = S::new(phi_full.coeffs()[1..].to_vec());
    let root_v = v.power(&rat(1, 2))?.compose_poly(f0, &w, cap);
    let map = PlaneMap::new(root_v.mul_monomial(1, 0), root_v.mul_monomial(0, 1), w.clone(), cap)?;
    let pulled = map.pullback(&Form::two_form(Poly::one()), cap)?;
    if pulled.coefficient()? != &full.compose_poly(f0, &w, cap) {
        return Err(Error::InvariantViolation("Φ*(dx∧dy) ≠ c(f) dx∧dy".into()));
    }
    if map.pull_function(f0, cap) != phi_full.compose_poly(f0, &w, cap) {
        return Err(Error::InvariantViolation("f∘Φ ≠ φ(f)".into()));
    }
    Ok(OrdinaryNormalization {
        map,
        phi: phi_full.with_order(c.order() + 1),
    })
}
