//! Normal forms of generic singular Lagrangians `L = (α, f)` on the plane
//! up to diffeomorphism, gauge `α ↦ α + dξ` and `f ↦ f + const`.
//!
//! | class | `ω = dα` at 0       | `f`                         |
//! |-------|---------------------|-----------------------------|
//! | LNF0  | nonzero             | regular                     |
//! | LNF1  | nonzero             | Morse critical point        |
//! | LNF2  | Martinet            | transversal to `H(ω)`       |
//! | LNF3  | Martinet            | Morse on `H(ω)`, regular    |

use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::form::{wedge_df_dg, DifferentialForm};
use crate::francoise::decompose_ordinary;
use crate::map::PlaneMap;
use crate::normalizer::{
    build_ordinary_normalizer, default_pair_cap, flatten_martinet_curve, morse_reduce, normalize_pair, scaled_series,
};
use crate::poly::Polynomial;
use crate::scalar::{int, Rational, Scalar};
use crate::series::Series;
use crate::weights::WeightSystem;

type Poly = Polynomial<Rational>;
type Form = DifferentialForm<Rational>;
type S = Series<Rational>;

/// The pair of potentials `(α, f)`; the Lagrangian is `α(ẋ) − f`.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianGerm {
    pub alpha: Form,
    pub f: Poly,
}

impl LagrangianGerm {
    pub fn new(alpha: Form, f: Poly) -> Result<Self> {
        alpha.expect_degree(1)?;
        Ok(LagrangianGerm { alpha, f })
    }

    /// `dα`.
    pub fn omega(&self) -> Form {
        self.alpha.exterior_derivative().expect("α is a 1-form")
    }

    /// `(Φ*α, f∘Φ)`, exact.
    pub fn pullback(&self, map: &PlaneMap<Rational>) -> LagrangianGerm {
        let (p, q) = self.alpha.components().expect("α is a 1-form");
        let sub = |g: &Poly| g.compose(&map.fx, &map.fy);
        let (p, q) = (sub(p), sub(q));
        LagrangianGerm {
            alpha: Form::one_form(
                &(&p * &map.fx.dx()) + &(&q * &map.fy.dx()),
                &(&p * &map.fx.dy()) + &(&q * &map.fy.dy()),
            ),
            f: sub(&self.f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassTag {
    Lnf0,
    Lnf1,
    Lnf2,
    Lnf3,
    Nongeneric,
}

impl ClassTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassTag::Lnf0 => "LNF0",
            ClassTag::Lnf1 => "LNF1",
            ClassTag::Lnf2 => "LNF2",
            ClassTag::Lnf3 => "LNF3",
            ClassTag::Nongeneric => "NONGENERIC",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [ClassTag::Lnf0, ClassTag::Lnf1, ClassTag::Lnf2, ClassTag::Lnf3, ClassTag::Nongeneric]
            .into_iter()
            .find(|t| t.as_str() == s)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Genericity tests evaluated exactly at the origin. `None` marks a test
/// that does not apply.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Conditions {
    pub omega_nonzero: bool,
    pub martinet: Option<bool>,
    pub df_nonzero: bool,
    pub hessian_nondegenerate: Option<bool>,
    pub restriction_critical: Option<bool>,
    pub restriction_morse: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub class: ClassTag,
    /// LNF1: signs of the diagonal Hessian, positive first. LNF2: the `∓` in
    /// `x²/2 ẏ ∓ y`. LNF3: the `±` in `x ± y²`.
    pub sign: Vec<i32>,
    /// The functional invariant (`φ` or `ψ`). Exact when `invariant_exact`;
    /// otherwise it is the normalized series and `scale` carries the rest.
    pub invariant: Option<S>,
    pub invariant_exact: bool,
    /// Normalized invariant with unit derivative at 0.
    pub normalized: Option<S>,
    /// LNF1: `|ab|/κ²`, so `φ(t) = φ̂(√scale · t)`.
    /// LNF3: `ℓ`, so `ψ(t) = ℓ ψ̂(|κ|^{-2/5} t)`.
    pub scale: Option<Rational>,
    pub kappa: Option<Rational>,
    /// Floating point coefficients of the invariant.
    pub invariant_f64: Option<Vec<f64>>,
    pub normalizer: Option<PlaneMap<Rational>>,
    pub conditions: Conditions,
    pub reason: Option<String>,
}

impl ClassificationReport {
    fn bare(class: ClassTag, conditions: Conditions) -> Self {
        ClassificationReport {
            class,
            sign: Vec::new(),
            invariant: None,
            invariant_exact: false,
            normalized: None,
            scale: None,
            kappa: None,
            invariant_f64: None,
            normalizer: None,
            conditions,
            reason: None,
        }
    }
}

/// `α + dξ`.
pub fn gauge_reduce(alpha: &Form, xi: &Poly) -> Result<Form> {
    alpha.expect_degree(1)?;
    let dxi = Form::Function(xi.clone()).exterior_derivative()?;
    Ok(alpha + &dxi)
}

fn restriction_is_morse(g: &Poly, f: &Poly) -> Result<bool> {
    let flat = flatten_martinet_curve(g, 3)?;
    let back = flat.invert(3)?;
    let f1 = back.pull_function(f, 2);
    Ok(!f1.coeff(0, 2).is_zero())
}

pub fn genericity_check(alpha: &Form, f: &Poly) -> Result<Conditions> {
    let g = alpha.exterior_derivative()?.coefficient()?.clone();
    let f = f - &Poly::constant(f.constant_term());
    let mut c = Conditions {
        omega_nonzero: !g.constant_term().is_zero(),
        df_nonzero: !f.coeff(1, 0).is_zero() || !f.coeff(0, 1).is_zero(),
        ..Conditions::default()
    };
    if c.omega_nonzero {
        if !c.df_nonzero {
            let (p, q, r) = (f.coeff(2, 0), f.coeff(1, 1), f.coeff(0, 2));
            c.hessian_nondegenerate = Some(!(int(4) * p * r - &q * &q).is_zero());
        }
        return Ok(c);
    }
    let martinet = !g.coeff(1, 0).is_zero() || !g.coeff(0, 1).is_zero();
    c.martinet = Some(martinet);
    if martinet {
        let critical = wedge_df_dg(&f, &g).constant_term().is_zero();
        c.restriction_critical = Some(critical);
        if critical && c.df_nonzero {
            c.restriction_morse = Some(restriction_is_morse(&g, &f)?);
        }
    }
    Ok(c)
}

/// Dispatches on [`genericity_check`] and computes the invariant.
///
/// `cap` bounds every internal truncation; the invariant is exact to
/// `order` when `cap ≥ 2·order + 4`.
pub fn classify(germ: &LagrangianGerm, cap: i64, order: usize) -> Result<ClassificationReport> {
    let f = &germ.f - &Poly::constant(germ.f.constant_term());
    let conditions = genericity_check(&germ.alpha, &f)?;
    let omega = germ.omega();
    let c = &conditions;
    let nongeneric = |reason: &str| {
        let mut r = ClassificationReport::bare(ClassTag::Nongeneric, conditions.clone());
        r.reason = Some(reason.to_string());
        Ok(r)
    };
    if c.omega_nonzero {
        if c.df_nonzero {
            return Ok(ClassificationReport::bare(ClassTag::Lnf0, conditions));
        }
        if c.hessian_nondegenerate != Some(true) {
            return nongeneric("degenerate critical point of f");
        }
        return classify_morse(&omega, &f, conditions.clone(), cap, order);
    }
    if c.martinet != Some(true) {
        return nongeneric("codimension > 2");
    }
    if c.restriction_critical == Some(false) {
        let g = omega.coefficient()?;
        let mut r = ClassificationReport::bare(ClassTag::Lnf2, conditions.clone());
        r.sign = vec![wedge_df_dg(&f, g).constant_term().sign()];
        return Ok(r);
    }
    if !c.df_nonzero {
        return nongeneric("f is critical on the Martinet curve");
    }
    if c.restriction_morse != Some(true) {
        return nongeneric("f restricted to the Martinet curve is degenerate");
    }
    let pair = normalize_pair(&omega, &f, cap, order)?;
    let mut r = ClassificationReport::bare(ClassTag::Lnf3, conditions);
    r.sign = vec![pair.sign];
    let exact = pair.invariant();
    r.invariant_exact = exact.is_some();
    r.invariant = Some(exact.unwrap_or_else(|| pair.psi.clone()));
    r.invariant_f64 = Some(pair.invariant_f64());
    r.normalized = Some(pair.psi.clone());
    r.scale = Some(pair.scale.clone());
    r.kappa = Some(pair.kappa.clone());
    r.normalizer = Some(pair.map);
    Ok(r)
}

fn classify_morse(omega: &Form, f: &Poly, conditions: Conditions, cap: i64, order: usize) -> Result<ClassificationReport> {
    let w = WeightSystem::morse();
    let m = morse_reduce(f, cap).map_err(Error::at("morse"))?;
    let f0 = m.quadratic();
    let omega1 = m.map.pullback(omega, cap).map_err(Error::at("morse"))?;
    let d = decompose_ordinary(&omega1, &f0, &w, cap as usize + 2).map_err(Error::at("decompose"))?;
    if !d.converged() {
        return Err(Error::Stage {
            stage: "decompose",
            source: Box::new(Error::InvariantViolation("decomposition did not terminate".into())),
        });
    }
    let c = d.c[0].with_order(order);
    let kappa = c.coeff(0);
    let c_hat = c.scale(&kappa.recip());
    let vey = build_ordinary_normalizer(&c_hat, &f0, cap).map_err(Error::at("vey"))?;
    let phi_hat = vey.phi.revert().map_err(Error::at("vey"))?;
    let scale = (&m.a * &m.b).abs() / (&kappa * &kappa);
    let rho_sq = scale.sqrt_exact();

    let mut r = ClassificationReport::bare(ClassTag::Lnf1, conditions);
    let mut sign = vec![m.a.sign(), m.b.sign()];
    sign.sort_by(|a, b| b.cmp(a));
    r.sign = sign;
    r.invariant_exact = rho_sq.is_some();
    r.invariant = Some(match &rho_sq {
        Some(rho) => scaled_series(&phi_hat, &Rational::from_integer(1.into()), rho),
        None => phi_hat.clone(),
    });
    let rho_f = scale.to_f64().sqrt();
    r.invariant_f64 = Some(
        phi_hat
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, p)| p.to_f64() * rho_f.powi(k as i32))
            .collect(),
    );
    r.normalized = Some(phi_hat);
    r.scale = Some(scale);
    r.kappa = Some(kappa);
    Ok(r)
}

/// Classification with the default cap for `order`.
pub fn classify_default(germ: &LagrangianGerm, order: usize) -> Result<ClassificationReport> {
    classify(germ, default_pair_cap(order), order)
}
