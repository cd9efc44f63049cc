//! Period integrals over the vanishing half-cycle of `f = x + y²`.
//!
//! `γ(t) = {x = t − y², |y| ≤ √t}` runs from one point of `f⁻¹(t) ∩ H` to the
//! other, `y` increasing. With `ω = x c(f) dx∧dy` and its primitive
//! `α = A dy`, `A = ∫₀ˣ s c(s + y²) ds`, the periods satisfy
//! `t V′(t) = c(t) V₀(t)` where `V₀` is the period of
//! `α₀ = x² dy − (xy/2) dx`, `V₀(t) = (4/3) t^{5/2}`.

use num_traits::Float;

use crate::error::{Error, Result};

pub const DEFAULT_NODES: usize = 64;
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Largest acceptable condition estimate in [`recover_invariant`].
pub const MAX_CONDITION: f64 = 1e8;

fn cst<F: Float>(v: f64) -> F {
    F::from(v).expect("float constant")
}

/// Nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre<F: Float>(n: usize) -> Vec<(F, F)> {
    let nf = cst::<F>(n as f64);
    let one = F::one();
    let two = cst::<F>(2.0);
    let pi = cst::<F>(std::f64::consts::PI);
    let mut rule = vec![(F::zero(), F::zero()); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (pi * (cst::<F>(i as f64) + cst(0.75)) / (nf + cst(0.5))).cos();
        let mut dp = F::one();
        for _ in 0..100 {
            let (mut p0, mut p1) = (one, x);
            for k in 2..=n {
                let kf = cst::<F>(k as f64);
                let p2 = ((two * kf - one) * x * p1 - (kf - one) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - one);
            let dx = p1 / dp;
            x = x - dx;
            if dx.abs() <= F::epsilon() * cst(4.0) {
                break;
            }
        }
        let w = two / ((one - x * x) * dp * dp);
        rule[i] = (x, w);
        rule[n - 1 - i] = (-x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = F::zero();
    }
    rule
}

fn integrate<F: Float>(a: F, b: F, nodes: usize, g: impl Fn(F) -> F) -> F {
    let half = (b - a) / cst(2.0);
    let mid = (a + b) / cst(2.0);
    gauss_legendre::<F>(nodes)
        .into_iter()
        .fold(F::zero(), |acc, (x, w)| acc + w * g(mid + half * x))
        * half
}

fn check_t<F: Float>(t: F) -> Result<()> {
    if t > F::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Flux("t must be positive".into()))
    }
}

fn check_nodes(nodes: usize) -> Result<()> {
    if nodes >= 8 {
        Ok(())
    } else {
        Err(Error::Flux(format!("need at least 8 nodes, got {nodes}")))
    }
}

/// `c(t)` by Horner.
pub fn eval_series<F: Float>(c: &[F], t: F) -> F {
    c.iter().rev().fold(F::zero(), |acc, &ck| acc * t + ck)
}

/// `A(x, y) = ∫₀ˣ s c(s + y²) ds`, expanded termwise:
/// `∫₀ˣ s (s + u)^k ds = Σ_j C(k, j) u^{k−j} x^{j+2} / (j + 2)`.
pub fn primitive<F: Float>(c: &[F], x: F, y: F) -> F {
    let u = y * y;
    let mut total = F::zero();
    for (k, &ck) in c.iter().enumerate() {
        let mut binom = F::one();
        let mut term = F::zero();
        for j in 0..=k {
            if j > 0 {
                binom = binom * cst(((k + 1 - j) as f64) / (j as f64));
            }
            term = term + binom * u.powi((k - j) as i32) * x.powi(j as i32 + 2) / cst((j + 2) as f64);
        }
        total = total + ck * term;
    }
    total
}

pub fn flux_v0<F: Float>(t: F, nodes: usize) -> Result<F> {
    check_t(t)?;
    check_nodes(nodes)?;
    let r = t.sqrt();
    // on γ: dx = −2y dy, so α₀ = (x² + x y²) dy
    Ok(integrate(-r, r, nodes, |y| {
        let x = t - y * y;
        x * x + x * y * y
    }))
}

pub fn flux_v<F: Float>(t: F, c: &[F], nodes: usize) -> Result<F> {
    check_t(t)?;
    check_nodes(nodes)?;
    let r = t.sqrt();
    Ok(integrate(-r, r, nodes, |y| primitive(c, t - y * y, y)))
}

/// [`flux_v`] along `y = √t sin θ`.
pub fn flux_v_angular<F: Float>(t: F, c: &[F], nodes: usize) -> Result<F> {
    check_t(t)?;
    check_nodes(nodes)?;
    let r = t.sqrt();
    let h = cst::<F>(std::f64::consts::FRAC_PI_2);
    Ok(integrate(-h, h, nodes, |th| {
        let y = r * th.sin();
        primitive(c, t - y * y, y) * r * th.cos()
    }))
}

/// `(4/3) Σ c_k t^{k+5/2} / (k + 5/2)`.
pub fn flux_v_series<F: Float>(t: F, c: &[F]) -> F {
    let s = t.sqrt();
    c.iter().enumerate().fold(F::zero(), |acc, (k, &ck)| {
        let e = k as f64 + 2.5;
        acc + ck * t.powi(k as i32 + 2) * s / cst(e)
    }) * cst(4.0 / 3.0)
}

/// `∫∫_D x dx dy` over the region bounded by `γ(t)` and `H`.
fn martinet_area<F: Float>(t: F, nodes: usize) -> F {
    let r = t.sqrt();
    integrate(-r, r, nodes, |y| integrate(F::zero(), t - y * y, nodes, |x| x))
}

/// `|∮ α₀ − (5/2) ∫∫ ω₀|` for the boundary of the region cut off by `γ(t)`.
/// The segment of `H` contributes nothing since `α₀` vanishes on `x = 0`.
pub fn stokes_defect<F: Float>(t: F, nodes: usize) -> Result<F> {
    let v0 = flux_v0(t, nodes)?;
    Ok((v0 - cst::<F>(2.5) * martinet_area(t, nodes)).abs())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxSample<F> {
    pub t: F,
    pub v: F,
    pub v0: F,
    pub vprime: F,
    /// `|t V′ − c V₀| / max(1, |c V₀|)`.
    pub residual: F,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FluxReport<F> {
    pub samples: Vec<FluxSample<F>>,
    /// Worst residual over the samples and the quadrature against series
    /// comparison.
    pub max_residual: F,
}

pub fn flux_sample<F: Float>(c: &[F], t: F, fd_step: F, nodes: usize) -> Result<FluxSample<F>> {
    let h = fd_step * t;
    let v = flux_v(t, c, nodes)?;
    let v0 = flux_v0(t, nodes)?;
    let vprime = (flux_v(t + h, c, nodes)? - flux_v(t - h, c, nodes)?) / (h + h);
    let cv0 = eval_series(c, t) * v0;
    let residual = (t * vprime - cv0).abs() / cv0.abs().max(F::one());
    Ok(FluxSample { t, v, v0, vprime, residual })
}

pub fn check_flux_relation<F: Float>(c: &[F], grid: &[F], fd_step: F, nodes: usize) -> Result<FluxReport<F>> {
    let mut samples = Vec::with_capacity(grid.len());
    let mut worst = F::zero();
    for &t in grid {
        let s = flux_sample(c, t, fd_step, nodes)?;
        let vs = flux_v_series(t, c);
        let series_gap = (s.v - vs).abs() / vs.abs().max(F::one());
        worst = worst.max(s.residual).max(series_gap);
        samples.push(s);
    }
    Ok(FluxReport { samples, max_residual: worst })
}

/// `n` evenly spaced points of `[a, b]`, both ends included.
pub fn uniform_grid<F: Float>(a: F, b: F, n: usize) -> Vec<F> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * cst::<F>(i as f64) / cst::<F>((n - 1) as f64))
            .collect(),
    }
}

/// Least squares solution of `M z = rhs` by Householder QR, with the ratio
/// of extreme diagonal entries of `R` as condition estimate.
fn least_squares<F: Float>(mut m: Vec<Vec<F>>, mut rhs: Vec<F>, cols: usize) -> Result<Vec<F>> {
    let rows = m.len();
    for k in 0..cols {
        let norm = (k..rows).fold(F::zero(), |a, i| a + m[i][k] * m[i][k]).sqrt();
        if norm == F::zero() {
            return Err(Error::GridInsufficient("rank deficient design".into()));
        }
        let alpha = if m[k][k] > F::zero() { -norm } else { norm };
        let mut v: Vec<F> = (k..rows).map(|i| m[i][k]).collect();
        v[0] = v[0] - alpha;
        let vv = v.iter().fold(F::zero(), |a, &x| a + x * x);
        if vv == F::zero() {
            continue;
        }
        for j in k..cols {
            let s = (k..rows).fold(F::zero(), |a, i| a + v[i - k] * m[i][j]) * cst(2.0) / vv;
            for i in k..rows {
                m[i][j] = m[i][j] - s * v[i - k];
            }
        }
        let s = (k..rows).fold(F::zero(), |a, i| a + v[i - k] * rhs[i]) * cst(2.0) / vv;
        for i in k..rows {
            rhs[i] = rhs[i] - s * v[i - k];
        }
    }
    let diag: Vec<F> = (0..cols).map(|k| m[k][k].abs()).collect();
    let hi = diag.iter().fold(F::zero(), |a, &d| a.max(d));
    let lo = diag.iter().fold(F::infinity(), |a, &d| a.min(d));
    if lo == F::zero() || hi / lo > cst(MAX_CONDITION) {
        return Err(Error::GridInsufficient(format!(
            "condition estimate {} exceeds {MAX_CONDITION:e}",
            (hi / lo).to_f64().unwrap_or(f64::INFINITY)
        )));
    }
    let mut z = vec![F::zero(); cols];
    for k in (0..cols).rev() {
        let s = (k + 1..cols).fold(rhs[k], |a, j| a - m[k][j] * z[j]);
        z[k] = s / m[k][k];
    }
    Ok(z)
}

/// Fits `c_0, …, c_{degree}` to `(3/4) t^{-3/2} V′(t)`.
pub fn recover_invariant<F: Float>(samples: &[FluxSample<F>], degree: usize) -> Result<Vec<F>> {
    let cols = degree + 1;
    if samples.len() < cols {
        return Err(Error::GridInsufficient(format!(
            "{} samples for {cols} coefficients",
            samples.len()
        )));
    }
    let m = samples
        .iter()
        .map(|s| (0..cols).map(|k| s.t.powi(k as i32)).collect())
        .collect();
    let rhs = samples
        .iter()
        .map(|s| cst::<F>(0.75) * s.vprime / (s.t * s.t.sqrt()))
        .collect();
    least_squares(m, rhs, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1usize, 2, 5, 8, 64] {
            let rule = gauss_legendre::<f64>(n);
            let total: f64 = rule.iter().map(|p| p.1).sum();
            assert!(close(total, 2.0, 1e-13), "n = {n}");
            // exact for degree 2n − 1
            let d = 2 * n - 2;
            let q: f64 = rule.iter().map(|&(x, w)| w * x.powi(d as i32)).sum();
            assert!(close(q, 2.0 / (d as f64 + 1.0), 1e-12), "n = {n}");
        }
    }

    #[test]
    fn v0_closed_form() {
        assert!(close(flux_v0(1.0, 64).unwrap(), 4.0 / 3.0, 1e-12));
        assert!(close(flux_v0(4.0, 64).unwrap(), 128.0 / 3.0, 1e-12));
        assert!(flux_v0(1e-12, 64).unwrap().abs() < 1e-20);
        assert!(flux_v0(0.0, 64).is_err());
        assert!(flux_v0(1.0, 4).is_err());
    }

    #[test]
    fn v_examples() {
        assert!(close(flux_v(1.0, &[1.0], 64).unwrap(), 8.0 / 15.0, 1e-12));
        assert!(close(flux_v(1.0, &[1.0, 1.0], 64).unwrap(), 32.0 / 35.0, 1e-12));
        assert!(flux_v(1e-12, &[1.0], 64).unwrap().abs() < 1e-20);
        assert!(close(flux_v_series(1.0, &[1.0, 1.0]), 32.0 / 35.0, 1e-15));
        let c = [0.5, -1.5, 2.0];
        assert!(close(flux_v_angular(0.7, &c, 64).unwrap(), flux_v(0.7, &c, 64).unwrap(), 1e-12));
    }

    #[test]
    fn primitive_is_exact() {
        // ∂_x A = x c(x + y²)
        let c = [1.0, -2.0, 0.5];
        let (x, y, h) = (0.3, -0.4, 1e-6);
        let dx = (primitive(&c, x + h, y) - primitive(&c, x - h, y)) / (2.0 * h);
        assert!(close(dx, x * eval_series(&c, x + y * y), 1e-8));
        assert_eq!(primitive(&c, 0.0, y), 0.0);
    }

    #[test]
    fn relation_examples() {
        let grid = [0.25, 0.5, 1.0];
        for c in [vec![1.0], vec![1.0, 1.0], vec![0.0, 1.0]] {
            let r = check_flux_relation(&c, &grid, 1e-5, 64).unwrap();
            assert!(r.max_residual < 1e-6, "{c:?}: {}", r.max_residual);
        }
    }

    #[test]
    fn stokes() {
        for t in [0.1, 0.5, 1.0] {
            assert!(stokes_defect(t, 64).unwrap() < 1e-12);
        }
    }

    #[test]
    fn recover_round_trip() {
        let grid = uniform_grid(0.1, 1.0, 10);
        for c in [vec![1.0], vec![1.0, 1.0], vec![0.5, -1.0, 2.0, 0.25, -1.5]] {
            let r = check_flux_relation(&c, &grid, 1e-5, 64).unwrap();
            let got = recover_invariant(&r.samples, c.len() - 1).unwrap();
            for (a, b) in got.iter().zip(&c) {
                assert!((a - b).abs() < 1e-4, "{got:?} vs {c:?}");
            }
        }
        assert!(matches!(recover_invariant::<f64>(&[], 0), Err(Error::GridInsufficient(_))));
        let same = check_flux_relation(&[1.0], &[0.5, 0.5, 0.5], 1e-5, 64).unwrap();
        assert!(matches!(recover_invariant(&same.samples, 2), Err(Error::GridInsufficient(_))));
    }

    #[test]
    fn generic_in_f32() {
        assert!((flux_v0(1.0f32, 16).unwrap() - 4.0 / 3.0).abs() < 1e-5);
    }
}
