use std::fs;
use std::path::Path;

use mkit::classifier::{classify as classify_germ, ClassTag, LagrangianGerm};
use mkit::error::Error;
use mkit::flux::{check_flux_relation, recover_invariant, uniform_grid};
use mkit::francoise::{decompose as decompose_boundary, decompose_ordinary, verify_certificate};
use mkit::json::*;
use mkit::local::{detect_weights, is_quasihomogeneous, milnor_boundary};
use mkit::normalizer::{
    check_pair_identities, default_pair_cap, martinet_invariant, morse_normalizer_signed, normalize_pair as pair,
    verify_morse_normalizer,
};
use mkit::{Form, Monomial, Poly, Rational, Scalar, SeriesT, WeightSystem};
use serde_json::{json, Map, Value};

use crate::GermArgs;

pub struct Failure {
    pub code: u8,
    pub message: String,
    /// Report to print despite the failure.
    pub report: Option<Value>,
}

impl Failure {
    pub fn malformed(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into(), report: None }
    }

    fn precondition(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into(), report: None }
    }

    fn verification(message: impl Into<String>) -> Self {
        Failure { code: 4, message: message.into(), report: None }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e.root() {
            Error::Parse(_) => 2,
            Error::InvariantViolation(_) => 4,
            _ => 3,
        };
        Failure { code, message: e.to_string(), report: None }
    }
}

type Out = Result<Value, Failure>;

pub fn render(report: &Value) -> String {
    serde_json::to_string_pretty(report).expect("JSON values serialize")
}

fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))
}

fn get<'a>(v: &'a Value, key: &str) -> Result<&'a Value, Failure> {
    v.get(key).ok_or_else(|| Failure::malformed(format!("report lacks {key:?}")))
}

fn engine(weights: Option<&WeightSystem>, mu: Option<usize>, basis: Option<&[Monomial]>) -> Value {
    let mut e = Map::new();
    e.insert("name".into(), json!("mkit"));
    e.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    if let Some(w) = weights {
        e.insert("weights".into(), weights_to_json(w));
    }
    if let Some(mu) = mu {
        e.insert("mu".into(), json!(mu));
    }
    if let Some(b) = basis {
        e.insert("basis".into(), basis_to_json(b));
    }
    Value::Object(e)
}

fn report(command: &str, input: Value, payload: Value, engine: Value) -> Value {
    let mut out = match payload {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    out.insert("command".into(), json!(command));
    out.insert("input".into(), input);
    out.insert("engine".into(), engine);
    Value::Object(out)
}

fn germ_weights(f: &Poly, weights: Option<&str>) -> Result<WeightSystem, Failure> {
    match weights {
        Some(s) => {
            let w = WeightSystem::parse(s).map_err(|e| Failure::malformed(e.to_string()))?;
            if !is_quasihomogeneous(f, &w) {
                return Err(Error::NotQuasihomogeneous.into());
            }
            Ok(w)
        }
        None => Ok(detect_weights(f)?),
    }
}

fn germ_input(f: &Poly, weights: Option<&str>) -> Value {
    json!({"f": poly_to_json(f), "weights": weights})
}

fn load_poly(path: &Path) -> Result<Poly, Failure> {
    Ok(poly_from_json(&read_json(path)?)?)
}

fn load_form(path: &Path, degree: u8) -> Result<Form, Failure> {
    Ok(expect_form_degree(&read_json(path)?, degree)?)
}

pub fn weights(args: &GermArgs) -> Out {
    let f = load_poly(&args.function)?;
    let w = germ_weights(&f, args.weights.as_deref())?;
    let payload = json!({"weights": weights_to_json(&w), "denom": w.denom()});
    Ok(report("weights", germ_input(&f, args.weights.as_deref()), payload, engine(Some(&w), None, None)))
}

pub fn milnor(args: &GermArgs, cap: Option<i64>) -> Out {
    let f = load_poly(&args.function)?;
    let w = germ_weights(&f, args.weights.as_deref())?;
    let cap = cap.unwrap_or_else(|| w.default_cap());
    let g = milnor_boundary(&f, &w, cap)?;
    let payload = json!({
        "mu": g.mu,
        "mu1": g.mu1,
        "mu0": g.mu0,
        "basis": basis_to_json(&g.basis),
        "weights": weights_to_json(&w),
        "cap": cap,
    });
    let eng = engine(Some(&w), Some(g.mu), Some(&g.basis));
    Ok(report("milnor", germ_input(&f, args.weights.as_deref()), payload, eng))
}

pub fn decompose(args: &GermArgs, omega: &Path, order: usize, ordinary: bool) -> Out {
    let f = load_poly(&args.function)?;
    let om = load_form(omega, 2)?;
    let w = germ_weights(&f, args.weights.as_deref())?;
    let d = if ordinary {
        decompose_ordinary(&om, &f, &w, order)?
    } else {
        decompose_boundary(&om, &milnor_boundary(&f, &w, w.default_cap())?, order)?
    };
    let mut input = germ_input(&f, args.weights.as_deref());
    input["omega"] = form_to_json(&om);
    input["order"] = json!(order);
    let out = report("decompose", input, decomposition_to_json(&d), engine(Some(&w), Some(d.mu()), Some(&d.basis)));
    if !d.converged() {
        return Err(Failure {
            code: 4,
            message: format!("residual nonzero after {} iterations", d.iterations),
            report: Some(out),
        });
    }
    Ok(out)
}

fn a1_engine() -> Value {
    engine(Some(&WeightSystem::a1()), Some(1), Some(&[Monomial::new(0, 0)]))
}

pub fn normalize_series(c: &Path, sign: i32, cap: Option<i64>) -> Out {
    if sign != 1 && sign != -1 {
        return Err(Failure::malformed("--sign must be 1 or -1"));
    }
    let c_val = read_json(c)?;
    let series = series_from_json(&c_val)?;
    let cap = cap.unwrap_or_else(|| default_pair_cap(series.order()));
    let r = morse_normalizer_signed(&series, sign, cap)?;
    let input = json!({"c": series_to_json(&series, false), "sign": sign});
    Ok(report("normalize", input, normalization_to_json(&r), a1_engine()))
}

pub fn normalize_pair(f: &Path, omega: &Path, order: usize, cap: Option<i64>) -> Out {
    let fun = load_poly(f)?;
    let om = load_form(omega, 2)?;
    let cap = cap.unwrap_or_else(|| default_pair_cap(order));
    let p = pair(&om, &fun, cap, order)?;
    let mut payload = normalization_to_json(&p.morse);
    payload["phi"] = map_to_json(&p.map);
    payload["psi"] = series_to_json(&p.psi, false);
    payload["cap"] = json!(cap);
    payload["kappa"] = rational_to_json(&p.kappa);
    payload["scale"] = rational_to_json(&p.scale);
    payload["c_unnormalized"] = series_to_json(&p.c, false);
    payload["flattening"] = map_to_json(&p.flattening);
    payload["flat_map"] = map_to_json(&p.flat_map);
    payload["invariant"] = p.invariant().map_or(Value::Null, |s| series_to_json(&s, false));
    payload["invariant_f64"] = json!(p.invariant_f64());
    let input = json!({"f": poly_to_json(&fun), "omega": form_to_json(&om), "order": order});
    Ok(report("normalize", input, payload, a1_engine()))
}

pub fn classify(alpha: &Path, f: &Path, order: usize, cap: Option<i64>) -> Out {
    let a = load_form(alpha, 1)?;
    let fun = load_poly(f)?;
    classify_forms(&a, &fun, order, cap.unwrap_or_else(|| default_pair_cap(order)))
}

fn classify_forms(alpha: &Form, f: &Poly, order: usize, cap: i64) -> Out {
    let germ = LagrangianGerm::new(alpha.clone(), f.clone())?;
    let r = classify_germ(&germ, cap, order)?;
    let eng = match r.class {
        ClassTag::Lnf3 => a1_engine(),
        ClassTag::Lnf1 => engine(Some(&WeightSystem::morse()), Some(1), Some(&[Monomial::new(0, 0)])),
        _ => engine(None, None, None),
    };
    let input = json!({"alpha": form_to_json(alpha), "f": poly_to_json(f), "order": order, "cap": cap});
    let out = report("classify", input, classification_to_json(&r), eng);
    if r.class == ClassTag::Nongeneric {
        return Err(Failure {
            code: 3,
            message: format!("nongeneric germ: {}", r.reason.as_deref().unwrap_or("unknown condition")),
            report: Some(out),
        });
    }
    Ok(out)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::malformed(format!("grid must look like a:b:n, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok(uniform_grid(a, b, n))
}

fn flux_payload(c: &SeriesT, grid: &str, nodes: usize, tol: f64, fd_step: f64) -> Result<(Value, f64), Failure> {
    let points = parse_grid(grid)?;
    if points.iter().any(|&t| t <= 0.0 || t > 1.0) {
        return Err(Failure::precondition("grid must lie in (0, 1]"));
    }
    let cf: Vec<f64> = c.coeffs().iter().map(Scalar::to_f64).collect();
    let r = check_flux_relation(&cf, &points, fd_step, nodes)?;
    let mut payload = flux_report_to_json(&r);
    payload["recovered"] = match recover_invariant(&r.samples, c.order()) {
        Ok(fit) => json!(fit),
        Err(_) => Value::Null,
    };
    payload["options"] = json!({"grid": grid, "nodes": nodes, "tol": tol, "fd_step": fd_step});
    Ok((payload, r.max_residual))
}

pub fn flux_check(c: &Path, grid: &str, nodes: usize, tol: f64, fd_step: f64) -> Out {
    let series = series_from_json(&read_json(c)?)?;
    let (payload, worst) = flux_payload(&series, grid, nodes, tol, fd_step)?;
    let input = json!({"c": series_to_json(&series, false)});
    let out = report("flux-check", input, payload, engine(Some(&WeightSystem::a1()), None, None));
    if !(worst <= tol) {
        return Err(Failure {
            code: 4,
            message: format!("max residual {worst:e} exceeds tolerance {tol:e}"),
            report: Some(out),
        });
    }
    Ok(out)
}

pub fn verify(path: &Path) -> Out {
    let rep = read_json(path)?;
    let command = get(&rep, "command")?
        .as_str()
        .ok_or_else(|| Failure::malformed("\"command\" must be a string"))?
        .to_string();
    let input = get(&rep, "input")?;
    match command.as_str() {
        "weights" => verify_weights(&rep, input)?,
        "milnor" => verify_milnor(&rep, input)?,
        "decompose" => verify_decompose(&rep, input)?,
        "normalize" => verify_normalize(&rep, input)?,
        "classify" => verify_classify(&rep, input)?,
        "flux-check" => verify_flux(&rep, input)?,
        other => return Err(Failure::malformed(format!("unknown command {other:?}"))),
    }
    Ok(json!({"command": "verify", "verified": command, "ok": true, "engine": engine(None, None, None)}))
}

fn input_weights(input: &Value) -> Option<String> {
    input.get("weights").and_then(Value::as_str).map(str::to_string)
}

fn verify_weights(rep: &Value, input: &Value) -> Result<(), Failure> {
    let f = poly_from_json(get(input, "f")?)?;
    let w = weights_from_json(get(rep, "weights")?)?;
    if !is_quasihomogeneous(&f, &w) {
        return Err(Failure::verification("f is not quasihomogeneous for the reported weights"));
    }
    if input_weights(input).is_none() && detect_weights(&f)? != w {
        return Err(Failure::verification("reported weights differ from the detected ones"));
    }
    Ok(())
}

fn verify_milnor(rep: &Value, input: &Value) -> Result<(), Failure> {
    let f = poly_from_json(get(input, "f")?)?;
    let w = weights_from_json(get(rep, "weights")?)?;
    let cap = get(rep, "cap")?.as_i64().ok_or_else(|| Failure::malformed("cap must be an integer"))?;
    let g = milnor_boundary(&f, &w, cap)?;
    let same = get(rep, "mu")?.as_u64() == Some(g.mu as u64)
        && get(rep, "mu1")?.as_u64() == Some(g.mu1 as u64)
        && get(rep, "mu0")?.as_u64() == Some(g.mu0 as u64)
        && basis_from_json(get(rep, "basis")?)? == g.basis;
    if !same {
        return Err(Failure::verification("Milnor data differ from recomputation"));
    }
    Ok(())
}

fn verify_decompose(rep: &Value, input: &Value) -> Result<(), Failure> {
    let f = poly_from_json(get(input, "f")?)?;
    let om = expect_form_degree(get(input, "omega")?, 2)?;
    let d = decomposition_from_json(rep, &f)?;
    if !verify_certificate(&d, &om, &f) {
        return Err(Failure::verification("certificate identity fails"));
    }
    Ok(())
}

fn verify_normalize(rep: &Value, input: &Value) -> Result<(), Failure> {
    if input.get("omega").is_none() {
        let r = normalization_from_json(rep)?;
        let c = series_from_json(get(input, "c")?)?;
        if !r.c.same_terms(&c) {
            return Err(Failure::verification("stored c differs from the input"));
        }
        return verify_morse_normalizer(&r).map_err(|e| Failure::verification(e.to_string()));
    }
    let f = poly_from_json(get(input, "f")?)?;
    let om = expect_form_degree(get(input, "omega")?, 2)?;
    let map = map_from_json(get(rep, "phi")?)?;
    let psi = series_from_json(get(rep, "psi")?)?;
    let kappa = rational_from_json(get(rep, "kappa")?)?;
    let scale = rational_from_json(get(rep, "scale")?)?;
    let sign = parse_sign(get(rep, "sign")?)?;
    let level = map.cap.min(psi.order() as i64);
    check_pair_identities(&map, &om, &f, &kappa, &scale, &psi, sign, level)
        .map_err(|e| Failure::verification(e.to_string()))?;
    check_invariant(get(rep, "invariant")?, &psi, &kappa, &scale)
}

fn check_invariant(stored: &Value, psi: &SeriesT, kappa: &Rational, scale: &Rational) -> Result<(), Failure> {
    let expected = martinet_invariant(psi, kappa, scale);
    let ok = match (stored, expected) {
        (Value::Null, None) => true,
        (Value::Null, Some(_)) => false,
        (v, e) => e.is_some_and(|e| series_from_json(v).is_ok_and(|s| s.same_terms(&e))),
    };
    if !ok {
        return Err(Failure::verification("invariant is not ℓ ψ(|κ|^{-2/5} t)"));
    }
    Ok(())
}

fn verify_classify(rep: &Value, input: &Value) -> Result<(), Failure> {
    let alpha = expect_form_degree(get(input, "alpha")?, 1)?;
    let f = poly_from_json(get(input, "f")?)?;
    let count = |k: &str| -> Result<u64, Failure> {
        get(input, k)?.as_u64().ok_or_else(|| Failure::malformed(format!("{k:?} must be a count")))
    };
    let (order, cap) = (count("order")? as usize, count("cap")? as i64);
    class_from_json(get(rep, "class")?)?;
    if let Some(nm) = rep.get("normalizer").filter(|v| !v.is_null()) {
        let map = map_from_json(nm)?;
        let psi = series_from_json(get(rep, "normalized")?)?;
        let kappa = rational_from_json(get(rep, "kappa")?)?;
        let scale = rational_from_json(get(rep, "scale")?)?;
        let sign = match get(rep, "sign")?.as_array().map(Vec::as_slice) {
            Some([s]) => parse_sign(s)?,
            _ => return Err(Failure::malformed("LNF3 sign must be a single entry")),
        };
        let omega = alpha.exterior_derivative()?;
        let level = map.cap.min(psi.order() as i64);
        check_pair_identities(&map, &omega, &f, &kappa, &scale, &psi, sign, level)
            .map_err(|e| Failure::verification(e.to_string()))?;
    }
    let fresh = match classify_forms(&alpha, &f, order, cap) {
        Ok(v) => v,
        Err(Failure { code: 3, report: Some(v), .. }) => v,
        Err(e) => return Err(e),
    };
    for key in ["class", "sign", "invariant", "invariant_exact", "normalized", "scale", "kappa", "conditions"] {
        if fresh.get(key) != rep.get(key) {
            return Err(Failure::verification(format!("{key:?} differs from reclassification")));
        }
    }
    Ok(())
}

fn verify_flux(rep: &Value, input: &Value) -> Result<(), Failure> {
    let c = series_from_json(get(input, "c")?)?;
    let opts = get(rep, "options")?;
    let num = |k: &str| -> Result<f64, Failure> {
        get(opts, k)?.as_f64().ok_or_else(|| Failure::malformed(format!("{k:?} must be a number")))
    };
    let grid = get(opts, "grid")?.as_str().ok_or_else(|| Failure::malformed("grid must be a string"))?;
    let nodes = num("nodes")? as usize;
    let (tol, fd_step) = (num("tol")?, num("fd_step")?);
    let (fresh, worst) = flux_payload(&c, grid, nodes, tol, fd_step)?;
    if !(worst <= tol) {
        return Err(Failure::verification(format!("max residual {worst:e} exceeds tolerance {tol:e}")));
    }
    if fresh.get("samples") != rep.get("samples") || fresh.get("max_residual") != rep.get("max_residual") {
        return Err(Failure::verification("samples differ from recomputation"));
    }
    Ok(())
}
