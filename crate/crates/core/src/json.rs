//! JSON encodings. Rationals are strings (`"3"`, `"-1/2"`); polynomials are
//! `{"terms":[{"e":[i,j],"c":"p/q"}]}`; 1-forms `{"dx":…,"dy":…}`; 2-forms
//! `{"dxdy":…}`. Object keys serialize sorted, so output is byte-stable.

use num_traits::Zero;
use serde_json::{json, Map as JsonMap, Value};

use crate::classifier::{ClassTag, ClassificationReport, Conditions};
use crate::error::{Error, Result};
use crate::flux::FluxReport;
use crate::francoise::DecompositionResult;
use crate::map::PlaneMap;
use crate::normalizer::NormalizationResult;
use crate::poly::{Monomial, Polynomial};
use crate::form::DifferentialForm;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::series::Series;
use crate::weights::WeightSystem;

type Poly = Polynomial<Rational>;
type Form = DifferentialForm<Rational>;
type S = Series<Rational>;

fn bad(what: &str) -> Error {
    Error::Parse(what.to_string())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(&format!("missing field {key:?}")))
}

pub fn rational_to_json(r: &Rational) -> Value {
    Value::String(format_rational(r))
}

/// Accepts rational strings and JSON integers.
pub fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
        _ => Err(bad(&format!("expected a rational string, got {v}"))),
    }
}

fn exponent(v: &Value) -> Result<u32> {
    v.as_u64()
        .and_then(|e| u32::try_from(e).ok())
        .ok_or_else(|| bad(&format!("invalid exponent {v}")))
}

pub fn monomial_to_json(m: &Monomial) -> Value {
    json!([m.ex, m.ey])
}

pub fn monomial_from_json(v: &Value) -> Result<Monomial> {
    match v.as_array().map(Vec::as_slice) {
        Some([i, j]) => Ok(Monomial::new(exponent(i)?, exponent(j)?)),
        _ => Err(bad(&format!("expected [i, j], got {v}"))),
    }
}

pub fn basis_to_json(basis: &[Monomial]) -> Value {
    Value::Array(basis.iter().map(monomial_to_json).collect())
}

pub fn basis_from_json(v: &Value) -> Result<Vec<Monomial>> {
    v.as_array()
        .ok_or_else(|| bad("basis must be an array"))?
        .iter()
        .map(monomial_from_json)
        .collect()
}

pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| json!({"e": [m.ex, m.ey], "c": format_rational(c)}))
        .collect();
    json!({ "terms": terms })
}

/// Repeated exponents are summed.
pub fn poly_from_json(v: &Value) -> Result<Poly> {
    let terms = field(v, "terms")?
        .as_array()
        .ok_or_else(|| bad("\"terms\" must be an array"))?;
    let mut p = Poly::zero();
    for t in terms {
        p.add_term(monomial_from_json(field(t, "e")?)?, rational_from_json(field(t, "c")?)?);
    }
    Ok(p)
}

pub fn form_to_json(form: &Form) -> Value {
    match form {
        DifferentialForm::Function(f) => poly_to_json(f),
        DifferentialForm::OneForm { dx, dy } => json!({"dx": poly_to_json(dx), "dy": poly_to_json(dy)}),
        DifferentialForm::TwoForm(g) => json!({ "dxdy": poly_to_json(g) }),
    }
}

/// A missing `dx` or `dy` of a 1-form reads as zero.
pub fn form_from_json(v: &Value) -> Result<Form> {
    if let Some(g) = v.get("dxdy") {
        return Ok(Form::two_form(poly_from_json(g)?));
    }
    if v.get("dx").is_some() || v.get("dy").is_some() {
        let part = |k: &str| v.get(k).map(poly_from_json).unwrap_or_else(|| Ok(Poly::zero()));
        return Ok(Form::one_form(part("dx")?, part("dy")?));
    }
    if v.get("terms").is_some() {
        return Ok(DifferentialForm::Function(poly_from_json(v)?));
    }
    Err(bad("expected a form with \"dx\"/\"dy\", \"dxdy\" or \"terms\""))
}

pub fn expect_form_degree(v: &Value, degree: u8) -> Result<Form> {
    let f = form_from_json(v)?;
    f.expect_degree(degree).map_err(|_| bad(&format!("expected a {degree}-form")))?;
    Ok(f)
}

/// Coefficients `[c_0, c_1, …]`; trailing zeros are dropped when `trim`.
pub fn series_to_json(s: &S, trim: bool) -> Value {
    let mut c = s.coeffs();
    if trim {
        while let Some((last, rest)) = c.split_last() {
            if !last.is_zero() || rest.is_empty() {
                break;
            }
            c = rest;
        }
    }
    Value::Array(c.iter().map(rational_to_json).collect())
}

/// Accepts a bare array or `{"c": [...]}`.
pub fn series_from_json(v: &Value) -> Result<S> {
    let arr = v
        .as_array()
        .or_else(|| v.get("c").and_then(Value::as_array))
        .ok_or_else(|| bad("series must be an array of rationals"))?;
    if arr.is_empty() {
        return Err(bad("empty series"));
    }
    Ok(S::new(arr.iter().map(rational_from_json).collect::<Result<_>>()?))
}

pub fn weights_to_json(w: &WeightSystem) -> Value {
    json!([format_rational(w.m1()), format_rational(w.m2())])
}

pub fn weights_from_json(v: &Value) -> Result<WeightSystem> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => WeightSystem::new(rational_from_json(a)?, rational_from_json(b)?),
        _ => Err(bad("weights must be [m1, m2]")),
    }
}

pub fn map_to_json(m: &PlaneMap<Rational>) -> Value {
    json!({
        "x": poly_to_json(&m.fx),
        "y": poly_to_json(&m.fy),
        "grading": weights_to_json(&m.grading),
        "cap": m.cap,
    })
}

pub fn map_from_json(v: &Value) -> Result<PlaneMap<Rational>> {
    let grading = weights_from_json(field(v, "grading")?)?;
    let cap = field(v, "cap")?.as_i64().ok_or_else(|| bad("cap must be an integer"))?;
    PlaneMap::new(poly_from_json(field(v, "x")?)?, poly_from_json(field(v, "y")?)?, grading, cap)
}

pub fn decomposition_to_json(d: &DecompositionResult<Rational>) -> Value {
    let residual = if d.residual.is_zero() {
        Value::Null
    } else {
        poly_to_json(d.residual.coefficient().expect("residual is a 2-form"))
    };
    json!({
        "mu": d.mu(),
        "basis": basis_to_json(&d.basis),
        "c": d.c.iter().map(|s| series_to_json(s, true)).collect::<Vec<_>>(),
        "xi": poly_to_json(&d.xi),
        "residual": residual,
        "iterations": d.iterations,
        "boundary": d.boundary,
        "weights": weights_to_json(&d.weights),
    })
}

pub fn decomposition_from_json(v: &Value, f: &Poly) -> Result<DecompositionResult<Rational>> {
    let basis = basis_from_json(field(v, "basis")?)?;
    let c = field(v, "c")?
        .as_array()
        .ok_or_else(|| bad("\"c\" must be an array"))?
        .iter()
        .map(series_from_json)
        .collect::<Result<Vec<_>>>()?;
    if c.len() != basis.len() {
        return Err(bad("\"c\" and \"basis\" differ in length"));
    }
    let residual = match field(v, "residual")? {
        Value::Null => Poly::zero(),
        r => poly_from_json(r)?,
    };
    Ok(DecompositionResult {
        f: f.clone(),
        weights: weights_from_json(field(v, "weights")?)?,
        basis,
        boundary: field(v, "boundary")?.as_bool().ok_or_else(|| bad("\"boundary\" must be a bool"))?,
        c,
        xi: poly_from_json(field(v, "xi")?)?,
        residual: Form::two_form(residual),
        iterations: field(v, "iterations")?
            .as_u64()
            .ok_or_else(|| bad("\"iterations\" must be a count"))? as usize,
    })
}

fn sign_string(s: i32) -> &'static str {
    if s < 0 {
        "-1"
    } else {
        "+1"
    }
}

pub fn parse_sign(v: &Value) -> Result<i32> {
    match v.as_str() {
        Some("+1") | Some("1") => Ok(1),
        Some("-1") => Ok(-1),
        _ => match v.as_i64() {
            Some(1) => Ok(1),
            Some(-1) => Ok(-1),
            _ => Err(bad(&format!("invalid sign {v}"))),
        },
    }
}

pub fn normalization_to_json(n: &NormalizationResult) -> Value {
    json!({
        "phi": map_to_json(&n.map),
        "psi": series_to_json(&n.psi, false),
        "w": series_to_json(&n.w, false),
        "v": series_to_json(&n.v, false),
        "c": series_to_json(&n.c, false),
        "sign": sign_string(n.sign),
        "cap": n.cap,
    })
}

pub fn normalization_from_json(v: &Value) -> Result<NormalizationResult> {
    Ok(NormalizationResult {
        map: map_from_json(field(v, "phi")?)?,
        psi: series_from_json(field(v, "psi")?)?,
        w: series_from_json(field(v, "w")?)?,
        v: series_from_json(field(v, "v")?)?,
        c: series_from_json(field(v, "c")?)?,
        cap: field(v, "cap")?.as_i64().ok_or_else(|| bad("cap must be an integer"))?,
        sign: parse_sign(field(v, "sign")?)?,
    })
}

fn conditions_to_json(c: &Conditions) -> Value {
    json!({
        "omega_nonzero": c.omega_nonzero,
        "martinet": c.martinet,
        "df_nonzero": c.df_nonzero,
        "hessian_nondegenerate": c.hessian_nondegenerate,
        "restriction_critical": c.restriction_critical,
        "restriction_morse": c.restriction_morse,
    })
}

pub fn classification_to_json(r: &ClassificationReport) -> Value {
    let opt_series = |s: &Option<S>| s.as_ref().map_or(Value::Null, |s| series_to_json(s, false));
    let opt_rat = |q: &Option<Rational>| q.as_ref().map_or(Value::Null, rational_to_json);
    let mut out = JsonMap::new();
    out.insert("class".into(), Value::String(r.class.as_str().into()));
    out.insert("sign".into(), json!(r.sign));
    out.insert("invariant".into(), opt_series(&r.invariant));
    out.insert("invariant_exact".into(), Value::Bool(r.invariant_exact));
    out.insert("normalized".into(), opt_series(&r.normalized));
    out.insert("scale".into(), opt_rat(&r.scale));
    out.insert("kappa".into(), opt_rat(&r.kappa));
    out.insert("invariant_f64".into(), json!(r.invariant_f64));
    out.insert("normalizer".into(), r.normalizer.as_ref().map_or(Value::Null, map_to_json));
    out.insert("conditions".into(), conditions_to_json(&r.conditions));
    out.insert("reason".into(), json!(r.reason));
    Value::Object(out)
}

pub fn class_from_json(v: &Value) -> Result<ClassTag> {
    v.as_str()
        .and_then(ClassTag::parse)
        .ok_or_else(|| bad(&format!("unknown class {v}")))
}

pub fn flux_report_to_json(r: &FluxReport<f64>) -> Value {
    let samples: Vec<Value> = r
        .samples
        .iter()
        .map(|s| json!({"t": s.t, "V": s.v, "V0": s.v0, "Vprime": s.vprime, "residual": s.residual}))
        .collect();
    json!({"samples": samples, "max_residual": r.max_residual})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn poly_round_trip() {
        let p = Poly::from_terms([(Monomial::new(0, 0), rat(3, 1)), (Monomial::new(2, 1), rat(-1, 2))]);
        let v = poly_to_json(&p);
        assert_eq!(
            v.to_string(),
            r#"{"terms":[{"c":"3","e":[0,0]},{"c":"-1/2","e":[2,1]}]}"#
        );
        assert_eq!(poly_from_json(&v).unwrap(), p);
        let dup: Value = serde_json::from_str(r#"{"terms":[{"e":[1,0],"c":"1"},{"e":[1,0],"c":2}]}"#).unwrap();
        assert_eq!(poly_from_json(&dup).unwrap(), Poly::from_ints(&[(3, 1, 0)]));
        assert!(poly_from_json(&json!({"terms":[{"e":[1,0],"c":"0.5"}]})).is_err());
        assert!(poly_from_json(&json!({"terms":[{"e":[-1,0],"c":"1"}]})).is_err());
    }

    #[test]
    fn form_round_trip() {
        for f in [
            Form::one_form(Poly::x(), Poly::zero()),
            Form::two_form(Poly::from_ints(&[(1, 1, 0), (1, 1, 1)])),
        ] {
            assert_eq!(form_from_json(&form_to_json(&f)).unwrap(), f);
        }
        assert_eq!(
            form_from_json(&json!({"dy": {"terms":[{"e":[1,0],"c":"1"}]}})).unwrap(),
            Form::one_form(Poly::zero(), Poly::x())
        );
        assert!(expect_form_degree(&json!({"dxdy": {"terms": []}}), 1).is_err());
    }

    #[test]
    fn series_trim() {
        let s = S::from_ints(&[1, 0, 0]);
        assert_eq!(series_to_json(&s, true), json!(["1"]));
        assert_eq!(series_to_json(&S::from_ints(&[0, 0]), true), json!(["0"]));
        assert_eq!(series_from_json(&json!(["1", "1/2"])).unwrap(), S::new(vec![rat(1, 1), rat(1, 2)]));
        assert!(series_from_json(&json!([])).is_err());
    }
}
