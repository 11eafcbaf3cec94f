//! H_λ through the two lattice formulas and the plethystic oracle, the
//! Hall–Littlewood collapse, (q,t)-Kostka coefficients, the inversion
//! duality and the Cauchy identities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde_json::{json, Value};
use thiserror::Error;

use crate::combinat::Partition;
use crate::exactalg::{poly_to_json, Poly};
use crate::lattice::{self, Formula, LatticeError};
use crate::qseries::swap_symbols;
use crate::symoracle::frac::{truncate, Factors, Frac};
use crate::symoracle::{self, alphabet, c_factors, macdonald_p_on, w_on, SymError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModmacError {
    #[error("need at least {needed} variables, got {got}")]
    InsufficientVariables { needed: usize, got: usize },
    #[error("negative coefficient: {0}")]
    NegativeCoefficient(String),
    #[error("truncation degree must be at least 1")]
    TruncationTooSmall,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HRoute {
    LatticeX,
    LatticeDual,
    Oracle,
}

impl HRoute {
    pub const ALL: [HRoute; 3] = [HRoute::LatticeX, HRoute::LatticeDual, HRoute::Oracle];
}

impl FromStr for HRoute {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lattice" | "lattice_x" | "x" => Ok(HRoute::LatticeX),
            "dual" | "lattice_dual" => Ok(HRoute::LatticeDual),
            "oracle" => Ok(HRoute::Oracle),
            _ => Err(format!("unknown route {s:?} (expected lattice, dual or oracle)")),
        }
    }
}

impl fmt::Display for HRoute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HRoute::LatticeX => "lattice_x",
            HRoute::LatticeDual => "lattice_dual",
            HRoute::Oracle => "oracle",
        })
    }
}

/// Monomial coefficients 𝒫_{λ,μ}(q,t) for μ with at most `nvars` parts.
/// Zero coefficients are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HResult {
    pub lambda: Partition,
    pub coeffs: BTreeMap<Partition, Poly>,
    pub route: HRoute,
    pub nvars: usize,
}

impl HResult {
    pub fn to_json(&self) -> Value {
        json!({
            "lambda": self.lambda.to_string(),
            "route": self.route.to_string(),
            "vars": self.nvars,
            "coeffs": table_json(&self.coeffs),
        })
    }
}

pub fn table_json(t: &BTreeMap<Partition, Poly>) -> Value {
    let mut m = serde_json::Map::new();
    for (mu, c) in t.iter().rev() {
        m.insert(mu.to_string(), poly_to_json(c));
    }
    Value::Object(m)
}

pub fn default_vars(lambda: &Partition) -> usize {
    lambda.len().max(lambda.largest()).max(1)
}

fn nonzero(t: BTreeMap<Partition, Poly>) -> BTreeMap<Partition, Poly> {
    t.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

fn assert_positive(what: &str, lambda: &Partition, t: &BTreeMap<Partition, Poly>) -> Result<(), ModmacError> {
    for (mu, c) in t {
        if !c.is_nonnegative() {
            return Err(ModmacError::NegativeCoefficient(format!("{what}[{lambda}] at {mu}: {c}")));
        }
    }
    Ok(())
}

/// H_λ in the monomial basis on `nvars` variables (default max(ℓ(λ), λ_1)).
pub fn modified_h(lambda: &Partition, nvars: Option<usize>, route: HRoute) -> Result<HResult, ModmacError> {
    let n = nvars.unwrap_or_else(|| default_vars(lambda));
    let needed = lambda.len().max(lambda.largest());
    if n < needed {
        return Err(ModmacError::InsufficientVariables { needed, got: n });
    }
    let coeffs = match route {
        HRoute::LatticeX => nonzero(lattice::partition_function_coeffs(lambda, n, Formula::X)?),
        HRoute::LatticeDual => nonzero(lattice::partition_function_coeffs(lambda, n, Formula::Z)?),
        HRoute::Oracle => symoracle::modified_h_table(lambda)?
            .iter()
            .filter(|(mu, _)| mu.len() <= n)
            .map(|(mu, c)| (mu.clone(), c.clone()))
            .collect(),
    };
    assert_positive("H", lambda, &coeffs)?;
    Ok(HResult { lambda: lambda.clone(), coeffs, route, nvars: n })
}

/// Modified Hall–Littlewood coefficients from the flag sum.
pub fn modified_hl(lambda: &Partition, nvars: Option<usize>) -> Result<BTreeMap<Partition, Poly>, ModmacError> {
    let n = nvars.unwrap_or_else(|| lambda.len().max(1));
    let t = nonzero(lattice::partition_function_coeffs(lambda, n, Formula::Hl)?);
    assert_positive("HL", lambda, &t)?;
    Ok(t)
}

/// K_{ν,λ}(q,t) for every ν ⊢ |λ|, from the full monomial table of the
/// chosen route.
pub fn kostka_qt(lambda: &Partition, route: HRoute) -> Result<BTreeMap<Partition, Poly>, ModmacError> {
    let h = modified_h(lambda, Some(lambda.weight().max(1)), route)?;
    let k = nonzero(symoracle::schur_coefficients(lambda.weight(), &h.coeffs));
    assert_positive("K", lambda, &k)?;
    Ok(k)
}

/// K_{ν,λ}(t) from the flag sum.
pub fn kostka_t(lambda: &Partition) -> Result<BTreeMap<Partition, Poly>, ModmacError> {
    let h = modified_hl(lambda, Some(lambda.weight().max(1)))?;
    let k = nonzero(symoracle::schur_coefficients(lambda.weight(), &h));
    assert_positive("K", lambda, &k)?;
    Ok(k)
}

/// 𝒫_{λ,μ}(q,t) = t^{n(λ)} q^{n(λ′)} 𝒫_{λ′,μ}(t⁻¹,q⁻¹) for every μ.
pub fn duality_check(lambda: &Partition, route: HRoute) -> Result<bool, ModmacError> {
    let n = lambda.weight().max(1);
    let lc = lambda.conjugate();
    let a = modified_h(lambda, Some(n), route)?.coeffs;
    let b = modified_h(&lc, Some(n), route)?.coeffs;
    let pre = Poly::monomial(BigInt::one(), &[("t", lambda.n() as i32), ("q", lc.n() as i32)]);
    let inv = [
        ("q", Poly::monomial(BigInt::one(), &[("t", -1)])),
        ("t", Poly::monomial(BigInt::one(), &[("q", -1)])),
    ];
    for mu in Partition::all(lambda.weight()) {
        let lhs = a.get(&mu).cloned().unwrap_or_default();
        let rhs = b.get(&mu).cloned().unwrap_or_default();
        let rhs = pre.mul(&rhs.subs(&inv).expect("Laurent substitution"));
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CauchyIdentity {
    W,
    PQ,
    Dual,
    MixedQ,
    MixedP,
}

impl CauchyIdentity {
    pub const ALL: [CauchyIdentity; 5] =
        [CauchyIdentity::PQ, CauchyIdentity::Dual, CauchyIdentity::W, CauchyIdentity::MixedQ, CauchyIdentity::MixedP];
}

impl FromStr for CauchyIdentity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "w" => Ok(CauchyIdentity::W),
            "pq" => Ok(CauchyIdentity::PQ),
            "dual" => Ok(CauchyIdentity::Dual),
            "mixedq" | "wq" => Ok(CauchyIdentity::MixedQ),
            "mixedp" | "wp" => Ok(CauchyIdentity::MixedP),
            _ => Err(format!("unknown identity {s:?}")),
        }
    }
}

impl fmt::Display for CauchyIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CauchyIdentity::W => "W",
            CauchyIdentity::PQ => "PQ",
            CauchyIdentity::Dual => "dual",
            CauchyIdentity::MixedQ => "mixedQ",
            CauchyIdentity::MixedP => "mixedP",
        })
    }
}

/// Both sides of a Cauchy identity truncated to degree 2·`degree` in the
/// alphabets.
#[derive(Debug, Clone)]
pub struct CauchySides {
    pub sum: Frac,
    pub product: Frac,
}

struct Alphabets {
    x: Vec<Poly>,
    z: Vec<Poly>,
    y: Vec<Poly>,
    w: Vec<Poly>,
    names: Vec<String>,
    cap: i32,
}

impl Alphabets {
    fn new(nx: usize, ny: usize, degree: usize) -> Self {
        let mut names = Vec::new();
        for (a, n) in [("x", nx), ("z", nx), ("y", ny), ("w", ny)] {
            names.extend((1..=n).map(|k| format!("{a}{k}")));
        }
        Alphabets {
            x: alphabet("x", nx),
            z: alphabet("z", nx),
            y: alphabet("y", ny),
            w: alphabet("w", ny),
            names,
            cap: 2 * degree as i32,
        }
    }

    fn cut(&self, f: &Frac) -> Frac {
        f.map_num(|p| truncate(p, &self.names, self.cap))
    }

    fn mul(&self, a: &Frac, b: &Frac) -> Frac {
        self.cut(&a.mul(b))
    }
}

fn factors(entries: &[((i32, i32), i32)]) -> Factors {
    let mut f = Factors::new();
    for &(k, m) in entries {
        *f.entry(k).or_insert(0) += m;
    }
    f.retain(|_, m| *m != 0);
    f
}

fn inv_c(lambda: &Partition, prime: bool) -> Frac {
    let f: Factors = c_factors(lambda, prime).into_iter().map(|(k, m)| (k, -m)).collect();
    Frac::from_factors(&f)
}

/// 1/(q;q)_k in the symbol `base` ("q" or "t").
fn inv_poch(base: &str, k: usize) -> Frac {
    let e: Vec<((i32, i32), i32)> =
        (1..=k as i32).map(|j| (if base == "q" { (j, 0) } else { (0, j) }, -1)).collect();
    Frac::from_factors(&factors(&e))
}

fn monomial(base: &str, e: i32) -> Poly {
    Poly::monomial(BigInt::one(), &[(base, e)])
}

/// Σ_k c_k u^k / (base;base)_k up to the cap, with c_k from `coef`.
fn basic_series(al: &Alphabets, u: &Poly, base: &str, coef: &dyn Fn(usize) -> Poly) -> Frac {
    let mut acc = Frac::zero();
    for k in 0..=(al.cap as usize / 2) {
        acc = acc.add(&inv_poch(base, k).mul_poly(&coef(k).mul(&u.pow(k as u32))));
    }
    al.cut(&acc)
}

/// 1/(u;base)_∞ = Σ u^k/(base;base)_k.
fn inv_infinite(al: &Alphabets, u: &Poly, base: &str) -> Frac {
    basic_series(al, u, base, &|_| Poly::one())
}

/// (u;base)_∞ = Σ (−1)^k base^{k(k−1)/2} u^k/(base;base)_k.
fn infinite(al: &Alphabets, u: &Poly, base: &str) -> Frac {
    basic_series(al, u, base, &|k| {
        let m = monomial(base, (k * k.saturating_sub(1) / 2) as i32);
        if k % 2 == 1 { m.neg() } else { m }
    })
}

/// exp of a truncated series whose terms all have alphabet degree ≥ 2.
fn exp_series(al: &Alphabets, l: &Frac) -> Frac {
    let mut acc = Frac::one();
    let mut term = Frac::one();
    for k in 1..=(al.cap as usize / 2) {
        term = al.mul(&term, l).div_int(&BigInt::from(k));
        acc = acc.add(&term);
    }
    acc
}

/// log of 1/(u;q,t)_∞ = Σ_r u^r / (r (1−q^r)(1−t^r)).
fn log_inv_double(al: &Alphabets, u: &Poly) -> Frac {
    let mut acc = Frac::zero();
    for r in 1..=(al.cap / 2) {
        let f = Frac::from_factors(&factors(&[((r, 0), -1), ((0, r), -1)]));
        acc = acc.add(&f.mul_poly(&u.pow(r as u32)).div_int(&BigInt::from(r)));
    }
    acc
}

fn sum_side(id: CauchyIdentity, al: &Alphabets, degree: usize) -> Result<Frac, ModmacError> {
    let mut acc = Frac::zero();
    for n in 0..=degree {
        for lam in Partition::all(n) {
            let term = match id {
                CauchyIdentity::PQ => {
                    let mut b = Frac::from_factors(&c_factors(&lam, false));
                    b = b.mul(&inv_c(&lam, true));
                    al.mul(&macdonald_p_on(&lam, &al.x), &macdonald_p_on(&lam, &al.y)).mul(&b)
                }
                CauchyIdentity::Dual => {
                    al.mul(&macdonald_p_on(&lam, &al.x), &macdonald_p_on(&lam.conjugate(), &al.y).swap_qt())
                }
                CauchyIdentity::W => {
                    let a = w_on(&lam, &al.x, &al.z)?;
                    let b = w_on(&lam, &al.y, &al.w)?;
                    Frac::from_poly(a.mul(&b)).mul(&inv_c(&lam, true)).mul(&inv_c(&lam, false))
                }
                CauchyIdentity::MixedQ => {
                    let a = w_on(&lam, &al.x, &al.z)?;
                    macdonald_p_on(&lam, &al.y).mul_poly(&a).mul(&inv_c(&lam, true))
                }
                CauchyIdentity::MixedP => {
                    let a = w_on(&lam, &al.x, &al.z)?;
                    macdonald_p_on(&lam.conjugate(), &al.w).swap_qt().mul_poly(&a).mul(&inv_c(&lam, false))
                }
            };
            acc = acc.add(&al.cut(&term));
        }
    }
    Ok(acc)
}

fn product_side(id: CauchyIdentity, al: &Alphabets) -> Frac {
    let pairs = |a: &[Poly], b: &[Poly]| -> Vec<Poly> {
        a.iter().flat_map(|u| b.iter().map(move |v| u.mul(v))).collect()
    };
    let t = Poly::var("t");
    let mut acc = Frac::one();
    match id {
        CauchyIdentity::PQ => {
            for u in pairs(&al.x, &al.y) {
                acc = al.mul(&acc, &al.mul(&infinite(al, &t.mul(&u), "q"), &inv_infinite(al, &u, "q")));
            }
        }
        CauchyIdentity::Dual => {
            for u in pairs(&al.x, &al.y) {
                acc = acc.mul_poly(&Poly::one().add(&u));
            }
            acc = al.cut(&acc);
        }
        CauchyIdentity::W => {
            let mut log = Frac::zero();
            for u in pairs(&al.x, &al.y).into_iter().chain(pairs(&al.z, &al.w)) {
                log = log.add(&log_inv_double(al, &u));
            }
            // log (−u;q,t)_∞ = −log of 1/(−u;q,t)_∞
            for u in pairs(&al.z, &al.y).into_iter().chain(pairs(&al.x, &al.w)) {
                log = log.sub(&log_inv_double(al, &u.neg()));
            }
            acc = exp_series(al, &al.cut(&log));
        }
        CauchyIdentity::MixedQ => {
            for u in pairs(&al.z, &al.y) {
                acc = al.mul(&acc, &infinite(al, &u.neg(), "q"));
            }
            for u in pairs(&al.x, &al.y) {
                acc = al.mul(&acc, &inv_infinite(al, &u, "q"));
            }
        }
        CauchyIdentity::MixedP => {
            for u in pairs(&al.x, &al.w) {
                acc = al.mul(&acc, &infinite(al, &u.neg(), "t"));
            }
            for u in pairs(&al.z, &al.w) {
                acc = al.mul(&acc, &inv_infinite(al, &u, "t"));
            }
        }
    }
    acc
}

/// Expand both sides of a Cauchy identity. The sum runs over |λ| ≤ degree
/// and everything is truncated at alphabet degree 2·degree.
pub fn cauchy_sides(id: CauchyIdentity, nx: usize, ny: usize, degree: usize) -> Result<CauchySides, ModmacError> {
    if degree < 1 {
        return Err(ModmacError::TruncationTooSmall);
    }
    let al = Alphabets::new(nx, ny, degree);
    Ok(CauchySides { sum: sum_side(id, &al, degree)?, product: product_side(id, &al) })
}

pub fn cauchy_check(id: CauchyIdentity, nx: usize, ny: usize, degree: usize) -> Result<bool, ModmacError> {
    let s = cauchy_sides(id, nx, ny, degree)?;
    Ok(s.sum.same_value(&s.product))
}

/// Exchange q and t in every coefficient.
pub fn swap_qt_table(t: &BTreeMap<Partition, Poly>) -> BTreeMap<Partition, Poly> {
    t.iter().map(|(k, v)| (k.clone(), swap_symbols(v, "q", "t"))).collect()
}
