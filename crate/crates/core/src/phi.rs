//! The polynomial Φ_{ν|ν̃}(z;t): truncated binomial series, finite form and
//! positive form, together with Φ′, the rotation r^k and the g_m polynomials.
//!
//! Index conventions. A [`SequencePair`] stores ν and ν̃ 0-based; the
//! formulas below are written 1-based with ν^0 = ν̃^0 = 0:
//!
//! | formula   | storage              |
//! |-----------|----------------------|
//! | ν^k, k≥1  | `sp.nu_slice()[k-1]` |
//! | ν^0       | `sp.nu(0) == 0`      |
//! | σ_k       | `ν^k − ν^{k−1}`      |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use parking_lot::RwLock;
use thiserror::Error;

use crate::combinat::{CombinatError, SequencePair};
use crate::exactalg::upoly::UPoly;
use crate::exactalg::Poly;
use crate::qseries::binom_dense;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PhiError {
    #[error("last entries differ: {0} vs {1}")]
    MismatchedTops(usize, usize),
    #[error(transparent)]
    Combinat(CombinatError),
    #[error("series has a nonzero coefficient at z^{degree}, above the bound {bound}")]
    TruncationResidual { degree: usize, bound: usize },
    #[error("ν̃_{index} < ν_{index}; rotate first")]
    NegativeDifference { index: usize },
    #[error("rotation index {k} outside 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("negative input {0}")]
    NegativeInput(i64),
    #[error("a and b have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
}

impl From<CombinatError> for PhiError {
    fn from(e: CombinatError) -> Self {
        match e {
            CombinatError::MismatchedTops(a, b) => PhiError::MismatchedTops(a, b),
            e => PhiError::Combinat(e),
        }
    }
}

/// A polynomial in z whose coefficients are Laurent polynomials in t,
/// stored densely by z-degree.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ZtPoly {
    c: Vec<UPoly>,
}

impl ZtPoly {
    pub fn zero() -> Self {
        ZtPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Self::term(0, UPoly::one())
    }

    /// `u · z^d`.
    pub fn term(d: usize, u: UPoly) -> Self {
        let mut c = vec![UPoly::zero(); d + 1];
        c[d] = u;
        let mut p = ZtPoly { c };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(UPoly::is_zero) {
            self.c.pop();
        }
    }

    /// Coefficients of z^0, z^1, ...
    pub fn coeffs(&self) -> &[UPoly] {
        &self.c
    }

    pub fn coeff(&self, d: usize) -> UPoly {
        self.c.get(d).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn z_degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn add_assign(&mut self, o: &ZtPoly) {
        if self.c.len() < o.c.len() {
            self.c.resize(o.c.len(), UPoly::zero());
        }
        for (a, b) in self.c.iter_mut().zip(&o.c) {
            a.add_assign(b);
        }
        self.trim();
    }

    pub fn add_term(&mut self, d: usize, u: &UPoly) {
        if u.is_zero() {
            return;
        }
        if self.c.len() <= d {
            self.c.resize(d + 1, UPoly::zero());
        }
        self.c[d].add_assign(u);
        self.trim();
    }

    pub fn mul(&self, o: &ZtPoly) -> ZtPoly {
        if self.is_zero() || o.is_zero() {
            return ZtPoly::zero();
        }
        let mut c = vec![UPoly::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j].add_assign(&a.mul(b));
                }
            }
        }
        let mut p = ZtPoly { c };
        p.trim();
        p
    }

    /// Multiply every coefficient by a polynomial in t.
    pub fn scale(&self, u: &UPoly) -> ZtPoly {
        let mut p = ZtPoly { c: self.c.iter().map(|a| a.mul(u)).collect() };
        p.trim();
        p
    }

    /// Multiply by z^d.
    pub fn shift_z(&self, d: usize) -> ZtPoly {
        if self.is_zero() {
            return ZtPoly::zero();
        }
        let mut c = vec![UPoly::zero(); d];
        c.extend(self.c.iter().cloned());
        ZtPoly { c }
    }

    /// Keep only z-degrees `≤ d`.
    fn truncate(&mut self, d: usize) {
        self.c.truncate(d + 1);
        self.trim();
    }

    pub fn is_nonnegative(&self) -> bool {
        self.c.iter().all(UPoly::is_nonnegative)
    }

    /// As a [`Poly`] in the symbols `z` and `t`.
    pub fn to_poly(&self) -> Poly {
        self.to_poly_in("z", "t")
    }

    pub fn to_poly_in(&self, z: &str, t: &str) -> Poly {
        let vars = [t.to_string(), z.to_string()];
        let terms = self.c.iter().enumerate().flat_map(|(d, u)| {
            u.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(k, c)| (vec![u.low() + k as i32, d as i32], c.clone()))
        });
        Poly::from_terms(&vars, terms)
    }
}

impl fmt::Debug for ZtPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZtPoly({})", self.to_poly())
    }
}

fn binom(a: i64, b: i64) -> Arc<UPoly> {
    binom_dense(a, b)
}

fn t_pow(e: i64) -> UPoly {
    UPoly::monomial(BigInt::one(), e as i32)
}

/// (z t^e; t)_n = Σ_k (−1)^k t^{ke + k(k−1)/2} binom(n,k) z^k.
fn z_pochhammer(e: i64, n: usize) -> ZtPoly {
    let mut out = ZtPoly::zero();
    for k in 0..=n {
        let sign = if k % 2 == 0 { BigInt::one() } else { -BigInt::one() };
        let k64 = k as i64;
        let u = binom(n as i64, k64).shift((k64 * e + k64 * (k64 - 1) / 2) as i32).scale(&sign);
        out.add_term(k, &u);
    }
    out
}

/// Evaluation route for Φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Route {
    Series,
    Finite,
    Positive,
}

impl FromStr for Route {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "series" => Ok(Route::Series),
            "finite" => Ok(Route::Finite),
            "positive" => Ok(Route::Positive),
            _ => Err(format!("unknown form {s:?}, expected series, finite or positive")),
        }
    }
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Series => "series",
            Route::Finite => "finite",
            Route::Positive => "positive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiResult {
    pub value: Poly,
    pub route: Route,
}

fn contained(sp: &SequencePair) -> bool {
    sp.nu_slice().iter().zip(sp.nutilde_slice()).all(|(a, b)| a <= b)
}

/// First k (1-based) minimizing ν̃_k − ν_k.
fn argmin_difference(sp: &SequencePair) -> usize {
    let d = |k: usize| sp.nutilde(k) as i64 - sp.nu(k) as i64;
    (1..=sp.len()).min_by_key(|&k| d(k)).unwrap()
}

/// The z-degree bound ν^{N−1} of Φ_{ν|ν̃}.
pub fn z_degree_bound(sp: &SequencePair) -> usize {
    sp.nu(sp.len() - 1)
}

/// Truncated binomial series
/// (z;t)_{ν̃^N+1} Σ_s z^s Π_{k=0}^{N−1} binom(ν̃^{k+1} − ν^k + s, ν̃^k − ν^k + s),
/// with every coefficient above the degree bound checked to vanish.
pub fn phi_series(sp: &SequencePair) -> Result<Poly, PhiError> {
    Ok(phi_series_zt(sp)?.to_poly())
}

pub fn phi_series_zt(sp: &SequencePair) -> Result<ZtPoly, PhiError> {
    let n = sp.len();
    let top = sp.top();
    let bound = z_degree_bound(sp);
    let d = bound + top + 2;
    let mut series = ZtPoly::zero();
    for s in 0..=d {
        let mut u = UPoly::one();
        for k in 0..n {
            let a = sp.nutilde(k + 1) as i64 - sp.nu(k) as i64 + s as i64;
            let b = sp.nutilde(k) as i64 - sp.nu(k) as i64 + s as i64;
            u = u.mul(&binom(a, b));
            if u.is_zero() {
                break;
            }
        }
        series.add_term(s, &u);
    }
    let mut out = z_pochhammer(0, top + 1).mul(&series);
    out.truncate(d);
    if let Some(deg) = out.z_degree() {
        if deg > bound {
            return Err(PhiError::TruncationResidual { degree: deg, bound });
        }
    }
    Ok(out)
}

/// Compositions λ with 0 ≤ λ_i ≤ bound_i.
fn boxed_compositions(bound: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &b in bound {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=b).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

/// Finite λ ⊆ σ form. Pairs with ν ⊄ ν̃ are rotated first.
pub fn phi_finite(sp: &SequencePair) -> Result<Poly, PhiError> {
    Ok(via_rotation(sp, phi_finite_contained)?.to_poly())
}

fn phi_finite_contained(sp: &SequencePair) -> Result<ZtPoly, PhiError> {
    let n = sp.len();
    let sigma: Vec<usize> = (1..n).map(|j| sp.nu(j) - sp.nu(j - 1)).collect();
    let mut out = ZtPoly::zero();
    for lam in boxed_compositions(&sigma) {
        let mut term = ZtPoly::one();
        let mut partial = 0usize;
        for j in 1..n {
            let lj = lam[j - 1];
            let e = sp.nu(j - 1) as i64 - partial as i64;
            partial += lj;
            let b1 = binom(sigma[j - 1] as i64, lj as i64);
            let a = sp.nutilde(j + 1) as i64 - sp.nu(j) as i64 + partial as i64;
            let b = sp.nutilde(j) as i64 - sp.nu(j) as i64 + partial as i64;
            let b2 = binom(a, b);
            let u = b1.mul(&b2).mul(&t_pow(e * lj as i64));
            if u.is_zero() {
                term = ZtPoly::zero();
                break;
            }
            term = term.mul(&z_pochhammer(e, sigma[j - 1] - lj)).scale(&u).shift_z(lj);
        }
        out.add_assign(&term);
    }
    Ok(out)
}

/// Run `f` on a pair with ν ⊆ ν̃, rotating first if needed.
fn via_rotation(
    sp: &SequencePair,
    f: impl Fn(&SequencePair) -> Result<ZtPoly, PhiError>,
) -> Result<ZtPoly, PhiError> {
    if contained(sp) {
        return f(sp);
    }
    let (rot, shift) = rotate(sp, argmin_difference(sp))?;
    Ok(f(&rot)?.shift_z(shift as usize))
}

/// One summand of the positive form: the array p_k^i (row i holds
/// k = i..N−1) and its contribution.
#[derive(Debug, Clone)]
pub struct PositiveTerm {
    pub rows: Vec<Vec<usize>>,
    pub value: ZtPoly,
}

/// Positive form: sum over arrays 0 ≤ p_k^k ≤ … ≤ p_{N−1}^k ≤ p_N^k = σ_k.
/// Requires ν ⊆ ν̃.
pub fn phi_positive(sp: &SequencePair) -> Result<Poly, PhiError> {
    let mut out = ZtPoly::zero();
    for term in phi_positive_terms(sp)? {
        out.add_assign(&term.value);
    }
    Ok(out.to_poly())
}

/// The nonvanishing summands of [`phi_positive`].
pub fn phi_positive_terms(sp: &SequencePair) -> Result<Vec<PositiveTerm>, PhiError> {
    for k in 1..=sp.len() {
        if sp.nutilde(k) < sp.nu(k) {
            return Err(PhiError::NegativeDifference { index: k });
        }
    }
    let n = sp.len();
    let sigma: Vec<usize> = (1..n).map(|j| sp.nu(j) - sp.nu(j - 1)).collect();
    // row i (1-based) has length N − i, entries p_i^i ≤ … ≤ p_{N−1}^i ≤ σ_i
    let row_choices: Vec<Vec<Vec<usize>>> =
        (1..n).map(|i| crate::combinat::nondecreasing(n - i, sigma[i - 1])).collect();
    let mut out = Vec::new();
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(n - 1);
    positive_rec(sp, &sigma, &row_choices, &mut rows, &mut out);
    Ok(out)
}

fn positive_rec(
    sp: &SequencePair,
    sigma: &[usize],
    choices: &[Vec<Vec<usize>>],
    rows: &mut Vec<Vec<usize>>,
    out: &mut Vec<PositiveTerm>,
) {
    if rows.len() == choices.len() {
        if let Some(value) = positive_summand(sp, sigma, rows) {
            out.push(PositiveTerm { rows: rows.clone(), value });
        }
        return;
    }
    for r in &choices[rows.len()] {
        rows.push(r.clone());
        positive_rec(sp, sigma, choices, rows, out);
        rows.pop();
    }
}

fn positive_summand(sp: &SequencePair, sigma: &[usize], rows: &[Vec<usize>]) -> Option<ZtPoly> {
    let n = sp.len();
    // p(k, i) = p_k^i for 1 ≤ i ≤ k ≤ N, with p_N^i = σ_i
    let p = |k: usize, i: usize| -> i64 {
        if k == n {
            sigma[i - 1] as i64
        } else {
            rows[i - 1][k - i] as i64
        }
    };
    let nt = |k: usize| sp.nutilde(k) as i64;
    let mut u = UPoly::one();
    let mut eta = 0i64;
    let mut zdeg = 0usize;
    for k in 1..n {
        zdeg += sigma[k - 1] - p(k, k) as usize;
        let top: i64 = (1..=k).map(|a| p(k + 1, a)).sum();
        let bot: i64 = (1..=k).map(|a| p(k, a)).sum();
        u = u.mul(&binom(nt(k + 1) - top, nt(k) - bot));
        if u.is_zero() {
            return None;
        }
        for i in 1..=k {
            u = u.mul(&binom(p(k + 1, i), p(k, i)));
            if u.is_zero() {
                return None;
            }
            let partial: i64 = (i..=k).map(|a| p(k, a)).sum();
            eta += (p(k + 1, i) - p(k, i)) * (nt(k) - partial);
        }
    }
    Some(ZtPoly::term(zdeg, u.shift(eta as i32)))
}

/// r^k applied to a single sequence: entries k+1..N shifted down by λ_k,
/// then entries 1..k−1 shifted up by λ_N − λ_k, and λ_N kept last.
pub fn rotate_seq(lambda: &[usize], k: usize) -> Vec<usize> {
    let n = lambda.len();
    let lk = lambda[k - 1];
    let ln = lambda[n - 1];
    let mut out = Vec::with_capacity(n);
    out.extend(lambda[k..n].iter().map(|x| x - lk));
    out.extend(lambda[..k - 1].iter().map(|x| ln + x - lk));
    out.push(ln);
    out
}

/// (r^k(ν), r^k(ν̃)) and the z-shift ν_k − ν̃_k with
/// Φ_{ν|ν̃} = z^{shift} Φ_{r^k ν | r^k ν̃}.
pub fn rotate(sp: &SequencePair, k: usize) -> Result<(SequencePair, i64), PhiError> {
    let n = sp.len();
    if k == 0 || k > n {
        return Err(PhiError::IndexOutOfRange { k, n });
    }
    let nu = rotate_seq(sp.nu_slice(), k);
    let nt = rotate_seq(sp.nutilde_slice(), k);
    let shift = sp.nu(k) as i64 - sp.nutilde(k) as i64;
    Ok((SequencePair::new(nu, nt)?, shift))
}

/// Φ by the chosen route; pairs with ν ⊄ ν̃ go through the rotation.
pub fn phi(sp: &SequencePair, route: Route) -> Result<PhiResult, PhiError> {
    let value = phi_zt(sp, route)?.to_poly();
    Ok(PhiResult { value, route })
}

pub fn phi_zt(sp: &SequencePair, route: Route) -> Result<ZtPoly, PhiError> {
    match route {
        Route::Series => phi_series_zt(sp),
        Route::Finite => via_rotation(sp, phi_finite_contained),
        Route::Positive => via_rotation(sp, |s| {
            let mut out = ZtPoly::zero();
            for term in phi_positive_terms(s)? {
                out.add_assign(&term.value);
            }
            Ok(out)
        }),
    }
}

fn cache() -> &'static RwLock<HashMap<SequencePair, Arc<ZtPoly>>> {
    static C: OnceLock<RwLock<HashMap<SequencePair, Arc<ZtPoly>>>> = OnceLock::new();
    C.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Memoized Φ_{ν|ν̃}, shared across threads.
pub fn phi_cached(sp: &SequencePair) -> Arc<ZtPoly> {
    if let Some(v) = cache().read().get(sp) {
        return v.clone();
    }
    let v = Arc::new(phi_series_zt(sp).expect("degree bound holds"));
    cache().write().insert(sp.clone(), v.clone());
    v
}

/// r(ν) = (ν^2 − ν^1, …, ν^N − ν^1, ν^N).
fn r_nu(sp: &SequencePair) -> Result<SequencePair, PhiError> {
    let nu = rotate_seq(sp.nu_slice(), 1);
    Ok(SequencePair::new(nu, sp.nutilde_slice().to_vec())?)
}

/// Φ′_{ν|ν̃} = z^{ν^1} Φ_{r(ν)|ν̃}.
pub fn phi_prime(sp: &SequencePair) -> Result<Poly, PhiError> {
    Ok(phi_prime_zt(sp)?.to_poly())
}

pub fn phi_prime_zt(sp: &SequencePair) -> Result<ZtPoly, PhiError> {
    let r = r_nu(sp)?;
    Ok(phi_series_zt(&r)?.shift_z(sp.nu(1)))
}

/// Memoized Φ′.
pub fn phi_prime_cached(sp: &SequencePair) -> Arc<ZtPoly> {
    let r = r_nu(sp).expect("r(ν) keeps the top entry");
    let base = phi_cached(&r);
    Arc::new(base.shift_z(sp.nu(1)))
}

/// Which side of the g_m identity to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GForm {
    Sum,
    Positive,
}

/// g_m(a, b; v) as a polynomial in `v` and `t`.
pub fn g_poly(m: i64, a: &[i64], b: &[i64], form: GForm) -> Result<Poly, PhiError> {
    if a.len() != b.len() {
        return Err(PhiError::LengthMismatch(a.len(), b.len()));
    }
    if let Some(&x) = std::iter::once(&m).chain(a).chain(b).find(|x| **x < 0) {
        return Err(PhiError::NegativeInput(x));
    }
    let out = match form {
        GForm::Sum => g_sum(m, a, b),
        GForm::Positive => g_positive(m, a, b),
    };
    Ok(out.to_poly_in("v", "t"))
}

fn g_sum(m: i64, a: &[i64], b: &[i64]) -> ZtPoly {
    let mut out = ZtPoly::zero();
    for k in 0..=m {
        let mut u = (*binom(m, k)).clone();
        for (ai, bi) in a.iter().zip(b) {
            u = u.mul(&binom(k + ai, *bi));
        }
        if u.is_zero() {
            continue;
        }
        out.add_assign(&z_pochhammer(0, (m - k) as usize).scale(&u).shift_z(k as usize));
    }
    out
}

fn g_positive(m: i64, a: &[i64], b: &[i64]) -> ZtPoly {
    let n = a.len();
    let c: Vec<i64> = (0..n).map(|i| a[i] + m - b[i]).collect();
    let mut out = ZtPoly::zero();
    let mut p = vec![m];
    g_positive_rec(m, a, &c, &mut p, n, &mut out);
    out
}

fn g_positive_rec(m: i64, a: &[i64], c: &[i64], p: &mut Vec<i64>, n: usize, out: &mut ZtPoly) {
    let i = p.len();
    if i > n {
        let mut u = UPoly::one();
        let mut vdeg = 0i64;
        let mut te = 0i64;
        for i in 1..=n {
            let (prev, cur) = (p[i - 1], p[i]);
            vdeg += prev - cur;
            te += (prev - cur) * (c[i - 1] - cur);
            u = u.mul(&binom(prev, cur)).mul(&binom(a[i - 1] + m - prev, c[i - 1] - cur));
            if u.is_zero() {
                return;
            }
        }
        out.add_term(vdeg as usize, &u.shift(te as i32));
        return;
    }
    for x in 0..=p[i - 1] {
        p.push(x);
        g_positive_rec(m, a, c, p, n, out);
        p.pop();
    }
}
