//! Polynomial gcd over Z[x_1, ..., x_n], plus exact division.
//!
//! The gcd first tries the heuristic evaluation method (evaluate one symbol
//! at a large integer, recurse, reconstruct ξ-adically, verify by trial
//! division) and falls back to primitive remainder sequences.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::poly::{Exponents, Poly};

/// Flip the sign so that the lexicographically leading coefficient is positive.
pub fn normalize_sign(p: Poly) -> Poly {
    match p.leading() {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

/// Exact quotient `a / b`, or `None` if `b` does not divide `a`.
///
/// Laurent exponents are allowed. Quotient terms are confined to the box
/// spanned by the Newton polytopes, which also guarantees termination when
/// the division is not exact.
pub fn div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    if b.is_zero() {
        return None;
    }
    if a.is_zero() {
        return Some(Poly::zero());
    }
    if let Some(c) = b.as_constant() {
        let mut out = BTreeMap::new();
        for (e, x) in a.terms() {
            let (q, r) = x.div_rem(&c);
            if !r.is_zero() {
                return None;
            }
            out.insert(e.clone(), q);
        }
        return Some(Poly::from_canonical_parts(Arc::from(a.vars().to_vec()), out));
    }
    let mut vars: Vec<String> = a.vars().to_vec();
    for v in b.vars() {
        if !vars.contains(v) {
            vars.push(v.clone());
        }
    }
    vars.sort();
    let vars: Arc<[String]> = Arc::from(vars);
    let mut rem: BTreeMap<Exponents, BigInt> = a.embed(&vars);
    let bt: BTreeMap<Exponents, BigInt> = b.embed(&vars);
    let amin = min_of(rem.keys());
    let amax = max_of(rem.keys());
    let bmin = min_of(bt.keys());
    let bmax = max_of(bt.keys());
    let lo: Vec<i32> = amin.iter().zip(&bmin).map(|(x, y)| x - y).collect();
    let hi: Vec<i32> = amax.iter().zip(&bmax).map(|(x, y)| x - y).collect();
    let (lb_e, lb_c) = bt.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
    let mut quot: BTreeMap<Exponents, BigInt> = BTreeMap::new();
    while let Some((le, lc)) = rem.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
        let qe: Exponents = le.iter().zip(&lb_e).map(|(x, y)| x - y).collect();
        if qe.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
            return None;
        }
        let (qc, r) = lc.div_rem(&lb_c);
        if !r.is_zero() {
            return None;
        }
        for (e, c) in &bt {
            let key: Exponents = e.iter().zip(&qe).map(|(x, y)| x + y).collect();
            let slot = rem.entry(key).or_insert_with(BigInt::zero);
            *slot -= c * &qc;
            if slot.is_zero() {
                let key: Exponents = e.iter().zip(&qe).map(|(x, y)| x + y).collect();
                rem.remove(&key);
            }
        }
        quot.insert(qe, qc);
    }
    Some(Poly::from_canonical_parts(vars, quot))
}

fn min_of<'a, I: Iterator<Item = &'a Exponents>>(it: I) -> Vec<i32> {
    let mut m: Option<Vec<i32>> = None;
    for e in it {
        m = Some(match m {
            None => e.clone(),
            Some(v) => v.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
        });
    }
    m.unwrap_or_default()
}

fn max_of<'a, I: Iterator<Item = &'a Exponents>>(it: I) -> Vec<i32> {
    let mut m: Option<Vec<i32>> = None;
    for e in it {
        m = Some(match m {
            None => e.clone(),
            Some(v) => v.iter().zip(e).map(|(a, b)| *a.max(b)).collect(),
        });
    }
    m.unwrap_or_default()
}

/// Split off the monomial content: returns `(exponents, p / x^exponents)`
/// with exponents keyed by symbol name.
fn split_monomial(p: &Poly) -> (Vec<(String, i32)>, Poly) {
    let m = p.min_exponents();
    let names: Vec<(String, i32)> =
        p.vars().iter().cloned().zip(m.iter().copied()).filter(|(_, e)| *e != 0).collect();
    if names.is_empty() {
        return (names, p.clone());
    }
    let neg: Vec<i32> = m.iter().map(|x| -x).collect();
    (names, p.shift_exponents(&neg))
}

/// Greatest common divisor, normalized to a positive leading coefficient.
/// For Laurent inputs the monomial part is the componentwise minimum.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    let (ma, pa) = split_monomial(a);
    let (mb, pb) = split_monomial(b);
    let g = gcd_rec(&pa, &pb);
    let mut mono: BTreeMap<String, i32> = BTreeMap::new();
    let ea: BTreeMap<String, i32> = ma.into_iter().collect();
    let eb: BTreeMap<String, i32> = mb.into_iter().collect();
    for k in ea.keys().chain(eb.keys()) {
        let x = *ea.get(k).unwrap_or(&0);
        let y = *eb.get(k).unwrap_or(&0);
        mono.insert(k.clone(), x.min(y));
    }
    let powers: Vec<(&str, i32)> = mono.iter().map(|(k, v)| (k.as_str(), *v)).collect();
    normalize_sign(g.shift(&powers))
}

/// gcd of polynomials with nonnegative exponents.
fn gcd_rec(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize_sign(b.clone());
    }
    if b.is_zero() {
        return normalize_sign(a.clone());
    }
    if let Some(c) = a.as_constant() {
        return Poly::from_bigint(c.gcd(&b.content()));
    }
    if let Some(c) = b.as_constant() {
        return Poly::from_bigint(c.gcd(&a.content()));
    }
    if a == b {
        return normalize_sign(a.clone());
    }
    if let Some(g) = heu_gcd(a, b, 0) {
        return g;
    }
    prs_gcd(a, b)
}

/// Primitive remainder sequence gcd for nonconstant, nonnegative-exponent
/// inputs.
pub(crate) fn prs_gcd(a: &Poly, b: &Poly) -> Poly {
    // Choose the first symbol present in either operand.
    let v = {
        let va = a.vars();
        let vb = b.vars();
        match (va.first(), vb.first()) {
            (Some(x), Some(y)) => x.min(y).clone(),
            (Some(x), None) => x.clone(),
            (None, Some(y)) => y.clone(),
            (None, None) => unreachable!(),
        }
    };
    let da = a.degree(&v).unwrap();
    let db = b.degree(&v).unwrap();
    if da == 0 {
        return gcd_rec(a, &content_in(b, &v));
    }
    if db == 0 {
        return gcd_rec(&content_in(a, &v), b);
    }
    let ca = content_in(a, &v);
    let cb = content_in(b, &v);
    let c = gcd_rec(&ca, &cb);
    let pa = div_exact(a, &ca).expect("content divides");
    let pb = div_exact(b, &cb).expect("content divides");
    let (mut p1, mut p2) = if da >= db { (pa, pb) } else { (pb, pa) };
    loop {
        let r = pseudo_rem(&p1, &p2, &v);
        if r.is_zero() {
            break;
        }
        if r.degree(&v).unwrap() == 0 {
            p2 = Poly::one();
            break;
        }
        p1 = p2;
        p2 = primitive_in(&r, &v);
    }
    let g = primitive_in(&p2, &v);
    normalize_sign(c.mul(&g))
}

const HEU_TRIES: usize = 6;
const HEU_MAX_DEPTH: usize = 8;

/// Heuristic gcd for polynomials with nonnegative exponents. `None` means
/// the heuristic gave up, not that the gcd is trivial.
fn heu_gcd(a: &Poly, b: &Poly, depth: usize) -> Option<Poly> {
    if let (Some(x), Some(y)) = (a.as_constant(), b.as_constant()) {
        return Some(Poly::from_bigint(x.gcd(&y)));
    }
    if depth > HEU_MAX_DEPTH {
        return None;
    }
    let ca = a.content();
    let cb = b.content();
    let cg = ca.gcd(&cb);
    let pa = div_exact(a, &Poly::from_bigint(ca)).unwrap();
    let pb = div_exact(b, &Poly::from_bigint(cb)).unwrap();
    if pa.as_constant().is_some() || pb.as_constant().is_some() {
        return Some(Poly::from_bigint(cg));
    }
    let v = pa.vars().iter().chain(pb.vars()).max().unwrap().clone();
    let norm = |p: &Poly| p.terms().values().map(|c| c.abs()).max().unwrap_or_default();
    let mut xi: BigInt = norm(&pa).min(norm(&pb)) * 2u32 + 29u32;
    for _ in 0..HEU_TRIES {
        let ea = eval_at(&pa, &v, &xi);
        let eb = eval_at(&pb, &v, &xi);
        if !ea.is_zero() && !eb.is_zero() {
            if let Some(h) = heu_gcd(&ea, &eb, depth + 1) {
                let g = reconstruct(&h, &v, &xi);
                let g = normalize_sign(div_exact(&g, &Poly::from_bigint(g.content())).unwrap_or(g));
                if !g.is_zero() && div_exact(&pa, &g).is_some() && div_exact(&pb, &g).is_some() {
                    return Some(g.scale(&cg));
                }
            }
        }
        xi = xi * 73794u32 / 27011u32;
    }
    None
}

/// `p` with the symbol `v` replaced by the integer `xi`.
fn eval_at(p: &Poly, v: &str, xi: &BigInt) -> Poly {
    let Some(k) = p.var_index(v) else { return p.clone() };
    let rest: Vec<String> = p.vars().iter().filter(|x| x.as_str() != v).cloned().collect();
    let mut out: BTreeMap<Exponents, BigInt> = BTreeMap::new();
    let mut pows: Vec<BigInt> = vec![BigInt::one()];
    for (e, c) in p.terms() {
        let d = e[k] as usize;
        while pows.len() <= d {
            let next = pows.last().unwrap() * xi;
            pows.push(next);
        }
        let mut key = e.clone();
        key.remove(k);
        *out.entry(key).or_insert_with(BigInt::zero) += c * &pows[d];
    }
    Poly::from_terms(&rest, out.into_iter())
}

/// Symmetric ξ-adic expansion of `h` as a polynomial in `v`.
fn reconstruct(h: &Poly, v: &str, xi: &BigInt) -> Poly {
    let half: BigInt = xi / 2u32;
    let mut out = Poly::zero();
    let mut h = h.clone();
    let mut i = 0;
    while !h.is_zero() {
        let rest = h.vars().to_vec();
        let digit: Vec<(Exponents, BigInt)> = h
            .terms()
            .iter()
            .map(|(e, c)| {
                let mut r = c.mod_floor(xi);
                if r > half {
                    r -= xi;
                }
                (e.clone(), r)
            })
            .collect();
        let g = Poly::from_terms(&rest, digit.into_iter());
        out = out.add(&g.shift(&[(v, i)]));
        h = div_exact(&h.sub(&g), &Poly::from_bigint(xi.clone())).expect("digit removal is exact");
        i += 1;
    }
    out
}

/// gcd of the coefficients with respect to `v`.
pub fn content_in(p: &Poly, v: &str) -> Poly {
    let mut g = Poly::zero();
    for c in p.coefficients_in(v).values() {
        g = gcd_rec(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// `p` divided by its content with respect to `v`, with positive leading sign.
fn primitive_in(p: &Poly, v: &str) -> Poly {
    let c = content_in(p, v);
    normalize_sign(div_exact(p, &c).expect("content divides"))
}

/// Pseudo-remainder of `a` by `b` as polynomials in `v`.
fn pseudo_rem(a: &Poly, b: &Poly, v: &str) -> Poly {
    let db = b.degree(v).unwrap();
    let cb = b.coefficients_in(v);
    let lcb = cb.get(&db).unwrap().clone();
    let mut r = a.clone();
    while !r.is_zero() {
        let dr = r.degree(v).unwrap();
        if dr < db {
            break;
        }
        let lcr = r.coefficient(&[(v, dr)]);
        let step = lcr.shift(&[(v, dr - db)]).mul(b);
        r = r.mul(&lcb).sub(&step);
    }
    r
}

/// Content removal on integers: `(num, den)` divided by the gcd of all
/// their coefficients, with the sign moved so `den` leads positively.
pub fn remove_integer_content(num: &Poly, den: &Poly) -> (Poly, Poly) {
    let g = num.content().gcd(&den.content());
    let (mut n, mut d) = if g.is_one() || g.is_zero() {
        (num.clone(), den.clone())
    } else {
        (div_exact(num, &Poly::from_bigint(g.clone())).unwrap(), div_exact(den, &Poly::from_bigint(g)).unwrap())
    };
    if d.leading().is_some_and(|(_, c)| c.is_negative()) {
        n = n.neg();
        d = d.neg();
    }
    (n, d)
}
