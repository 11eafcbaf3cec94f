//! Exact arithmetic: sparse Laurent polynomials over Z, rational functions,
//! and the JSON interchange format.

pub mod gcd;
pub mod poly;
pub mod ratfun;
pub mod upoly;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde_json::{json, Value};
use thiserror::Error;

pub use poly::{one_minus, Exponents, Poly};
pub use ratfun::RationalFunction;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("cannot substitute a non-unit into negative powers of `{0}`")]
    NonUnitIntoNegativeExponent(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed polynomial: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &Poly, b: &Poly, op: ArithOp) -> Poly {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
    }
}

pub fn poly_substitute(p: &Poly, bindings: &BTreeMap<String, Poly>) -> Result<Poly, ExactError> {
    p.substitute(bindings)
}

pub fn poly_coefficient(p: &Poly, partial: &BTreeMap<String, i32>) -> Poly {
    let v: Vec<(&str, i32)> = partial.iter().map(|(k, e)| (k.as_str(), *e)).collect();
    p.coefficient(&v)
}

pub fn ratfun_normalize(r: &RationalFunction) -> Result<RationalFunction, ExactError> {
    if r.denominator().is_zero() {
        return Err(ExactError::ZeroDenominator);
    }
    Ok(r.normalize())
}

/// `{"vars": [...], "terms": [{"exp": [...], "coef": "..."}]}` with terms in
/// lexicographic exponent order.
pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .iter()
        .map(|(e, c)| json!({"exp": e, "coef": c.to_string()}))
        .collect();
    json!({"vars": p.vars(), "terms": terms})
}

pub fn poly_from_json(v: &Value) -> Result<Poly, ExactError> {
    let bad = |m: &str| ExactError::Parse(m.to_string());
    let vars: Vec<String> = v
        .get("vars")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing `vars` array"))?
        .iter()
        .map(|x| x.as_str().map(str::to_string).ok_or_else(|| bad("symbol names must be strings")))
        .collect::<Result<_, _>>()?;
    let mut seen = vars.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != vars.len() {
        return Err(bad("duplicate symbol"));
    }
    let raw = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing `terms` array"))?;
    let mut terms = Vec::with_capacity(raw.len());
    for t in raw {
        let exp: Vec<i32> = t
            .get("exp")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("term without `exp`"))?
            .iter()
            .map(|x| {
                x.as_i64()
                    .and_then(|y| i32::try_from(y).ok())
                    .ok_or_else(|| bad("exponent is not a 32-bit integer"))
            })
            .collect::<Result<_, _>>()?;
        if exp.len() != vars.len() {
            return Err(bad("exponent length differs from symbol count"));
        }
        let coef: BigInt = t
            .get("coef")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("coefficient must be a decimal string"))?
            .parse()
            .map_err(|_| bad("coefficient is not a decimal integer"))?;
        terms.push((exp, coef));
    }
    Ok(Poly::from_terms(&vars, terms))
}

pub fn poly_to_json_string(p: &Poly) -> String {
    poly_to_json(p).to_string()
}

pub fn poly_from_json_str(s: &str) -> Result<Poly, ExactError> {
    let v: Value = serde_json::from_str(s).map_err(|e| ExactError::Parse(e.to_string()))?;
    poly_from_json(&v)
}
