//! Sparse multivariate Laurent polynomials over arbitrary-precision integers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::ExactError;

/// Exponent vector, one entry per symbol of the owning polynomial.
pub type Exponents = Vec<i32>;

/// A sparse Laurent polynomial in named symbols.
///
/// The symbol table is sorted and contains only symbols that occur with a
/// nonzero exponent in some term, so two equal polynomials always have
/// identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    vars: Arc<[String]>,
    terms: BTreeMap<Exponents, BigInt>,
}

fn empty_vars() -> Arc<[String]> {
    Arc::from(Vec::<String>::new())
}

/// Merge two sorted symbol tables and return the union together with the
/// position of every input symbol inside the union.
fn union_vars(a: &[String], b: &[String]) -> (Arc<[String]>, Vec<usize>, Vec<usize>) {
    let mut out: Vec<String> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let mut ma = Vec::with_capacity(a.len());
    let mut mb = Vec::with_capacity(b.len());
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            ma.push(out.len());
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            mb.push(out.len());
            out.push(b[j].clone());
            j += 1;
        } else {
            ma.push(out.len());
            mb.push(out.len());
            out.push(a[i].clone());
            i += 1;
            j += 1;
        }
    }
    (Arc::from(out), ma, mb)
}

fn remap(e: &[i32], map: &[usize], len: usize) -> Exponents {
    let mut out = vec![0; len];
    for (k, &pos) in map.iter().enumerate() {
        out[pos] = e[k];
    }
    out
}

impl Poly {
    pub fn zero() -> Self {
        Poly { vars: empty_vars(), terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        Self::from_bigint(c.into())
    }

    pub fn from_bigint(c: BigInt) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        Poly { vars: empty_vars(), terms }
    }

    /// The polynomial consisting of a single symbol.
    pub fn var(name: &str) -> Self {
        Self::monomial(BigInt::one(), &[(name, 1)])
    }

    /// `coef * prod name^exp`; repeated names multiply.
    pub fn monomial(coef: BigInt, powers: &[(&str, i32)]) -> Self {
        if coef.is_zero() {
            return Self::zero();
        }
        let mut acc: BTreeMap<String, i32> = BTreeMap::new();
        for (n, e) in powers {
            *acc.entry((*n).to_string()).or_insert(0) += *e;
        }
        acc.retain(|_, e| *e != 0);
        let vars: Vec<String> = acc.keys().cloned().collect();
        let exps: Exponents = acc.values().copied().collect();
        let mut terms = BTreeMap::new();
        terms.insert(exps, coef);
        Poly { vars: Arc::from(vars), terms }
    }

    /// Build from raw parts; symbols need not be sorted and may repeat.
    pub fn from_terms<I>(vars: &[String], terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, BigInt)>,
    {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        let mut sorted: Vec<String> = Vec::new();
        let mut pos = vec![0usize; vars.len()];
        for &k in &order {
            if sorted.last() != Some(&vars[k]) {
                sorted.push(vars[k].clone());
            }
            pos[k] = sorted.len() - 1;
        }
        let len = sorted.len();
        let mut acc: BTreeMap<Exponents, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length must match symbol count");
            let mut out = vec![0; len];
            for (k, x) in e.iter().enumerate() {
                out[pos[k]] += x;
            }
            *acc.entry(out).or_insert_with(BigInt::zero) += c;
        }
        Self::canonical(Arc::from(sorted), acc)
    }

    /// Drop zero coefficients and unused symbols.
    fn canonical(vars: Arc<[String]>, mut terms: BTreeMap<Exponents, BigInt>) -> Self {
        terms.retain(|_, c| !c.is_zero());
        let used: Vec<bool> =
            (0..vars.len()).map(|k| terms.keys().any(|e| e[k] != 0)).collect();
        if used.iter().all(|&u| u) {
            return Poly { vars, terms };
        }
        let keep: Vec<usize> = (0..vars.len()).filter(|&k| used[k]).collect();
        let nv: Vec<String> = keep.iter().map(|&k| vars[k].clone()).collect();
        let nt = terms
            .into_iter()
            .map(|(e, c)| (keep.iter().map(|&k| e[k]).collect(), c))
            .collect();
        Poly { vars: Arc::from(nv), terms: nt }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, BigInt> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.terms.get(&Vec::new()).is_some_and(|c| c.is_one())
    }

    /// Constant value if the polynomial has no symbols.
    pub fn as_constant(&self) -> Option<BigInt> {
        if self.vars.is_empty() {
            Some(self.terms.get(&Vec::new()).cloned().unwrap_or_else(BigInt::zero))
        } else {
            None
        }
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.binary_search_by(|v| v.as_str().cmp(name)).ok()
    }

    /// Largest exponent of `name` (0 if absent, `None` for the zero polynomial).
    pub fn degree(&self, name: &str) -> Option<i32> {
        if self.is_zero() {
            return None;
        }
        Some(match self.var_index(name) {
            Some(k) => self.terms.keys().map(|e| e[k]).max().unwrap(),
            None => 0,
        })
    }

    /// Smallest exponent of `name` (0 if absent, `None` for the zero polynomial).
    pub fn min_degree(&self, name: &str) -> Option<i32> {
        if self.is_zero() {
            return None;
        }
        Some(match self.var_index(name) {
            Some(k) => self.terms.keys().map(|e| e[k]).min().unwrap(),
            None => 0,
        })
    }

    pub fn total_degree(&self) -> Option<i32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// No coefficient is negative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| c.is_positive())
    }

    /// Exponents exist only with nonnegative entries.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x >= 0))
    }

    /// Express both operands over a shared symbol table.
    fn unify(&self, other: &Poly) -> (Arc<[String]>, Vec<Exponents>, Vec<Exponents>) {
        let (vars, ma, mb) = union_vars(&self.vars, &other.vars);
        let n = vars.len();
        let a = self.terms.keys().map(|e| remap(e, &ma, n)).collect();
        let b = other.terms.keys().map(|e| remap(e, &mb, n)).collect();
        (vars, a, b)
    }

    fn combine(&self, other: &Poly, sign: i32) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.vars == other.vars {
            let mut terms = self.terms.clone();
            for (e, c) in &other.terms {
                let slot = terms.entry(e.clone()).or_insert_with(BigInt::zero);
                if sign > 0 {
                    *slot += c;
                } else {
                    *slot -= c;
                }
            }
            return Self::canonical(self.vars.clone(), terms);
        }
        let (vars, ea, eb) = self.unify(other);
        let mut terms: BTreeMap<Exponents, BigInt> = BTreeMap::new();
        for (e, c) in ea.into_iter().zip(self.terms.values()) {
            terms.insert(e, c.clone());
        }
        for (e, c) in eb.into_iter().zip(other.terms.values()) {
            let slot = terms.entry(e).or_insert_with(BigInt::zero);
            if sign > 0 {
                *slot += c;
            } else {
                *slot -= c;
            }
        }
        Self::canonical(vars, terms)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.combine(other, -1)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        let (vars, ea, eb) = if self.vars == other.vars {
            (
                self.vars.clone(),
                self.terms.keys().cloned().collect::<Vec<_>>(),
                other.terms.keys().cloned().collect::<Vec<_>>(),
            )
        } else {
            self.unify(other)
        };
        let ca: Vec<&BigInt> = self.terms.values().collect();
        let cb: Vec<&BigInt> = other.terms.values().collect();
        let mut acc: HashMap<Exponents, BigInt> = HashMap::with_capacity(ea.len() * eb.len());
        let n = vars.len();
        for (x, cx) in ea.iter().zip(&ca) {
            for (y, cy) in eb.iter().zip(&cb) {
                let mut e = Vec::with_capacity(n);
                e.extend(x.iter().zip(y).map(|(p, q)| p + q));
                let prod = *cx * *cy;
                match acc.get_mut(&e) {
                    Some(slot) => *slot += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        Self::canonical(vars, acc.into_iter().collect())
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Multiply by a Laurent monomial given as `(symbol, exponent)` pairs.
    pub fn shift(&self, powers: &[(&str, i32)]) -> Poly {
        self.mul(&Poly::monomial(BigInt::one(), powers))
    }

    /// Image under the ring homomorphism sending each bound symbol to its
    /// binding. Unbound symbols are left alone.
    pub fn substitute(&self, bindings: &BTreeMap<String, Poly>) -> Result<Poly, ExactError> {
        if self.is_zero() {
            return Ok(Poly::zero());
        }
        let bound: Vec<Option<&Poly>> = self.vars.iter().map(|v| bindings.get(v)).collect();
        if bound.iter().all(|b| b.is_none()) {
            return Ok(self.clone());
        }
        let mut inverses: Vec<Option<Poly>> = vec![None; self.vars.len()];
        let mut cache: HashMap<(usize, i32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        let mut free_vars: Vec<String> = Vec::new();
        let mut free_pos: Vec<usize> = Vec::new();
        for (k, b) in bound.iter().enumerate() {
            if b.is_none() {
                free_vars.push(self.vars[k].clone());
                free_pos.push(k);
            }
        }
        // Group terms by their free part to limit the number of products.
        let mut grouped: BTreeMap<Vec<i32>, Vec<(Exponents, BigInt)>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let bound_part: Vec<i32> = e
                .iter()
                .enumerate()
                .map(|(k, &x)| if bound[k].is_some() { x } else { 0 })
                .collect();
            let free_part: Exponents = free_pos.iter().map(|&k| e[k]).collect();
            grouped.entry(bound_part).or_default().push((free_part, c.clone()));
        }
        for (bexp, frees) in grouped {
            let mut factor = Poly::one();
            for (k, &x) in bexp.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let p = bound[k].unwrap();
                let key = (k, x);
                if let Some(v) = cache.get(&key) {
                    factor = factor.mul(v);
                    continue;
                }
                let val = if x > 0 {
                    p.pow(x as u32)
                } else {
                    if inverses[k].is_none() {
                        inverses[k] = Some(p.unit_inverse().ok_or_else(|| {
                            ExactError::NonUnitIntoNegativeExponent(self.vars[k].clone())
                        })?);
                    }
                    inverses[k].as_ref().unwrap().pow((-x) as u32)
                };
                factor = factor.mul(&val);
                cache.insert(key, val);
            }
            if factor.is_zero() {
                continue;
            }
            let free = Poly::from_terms(&free_vars, frees);
            out = out.add(&free.mul(&factor));
        }
        Ok(out)
    }

    /// Convenience wrapper around [`Poly::substitute`].
    pub fn subs(&self, bindings: &[(&str, Poly)]) -> Result<Poly, ExactError> {
        let map: BTreeMap<String, Poly> =
            bindings.iter().map(|(n, p)| ((*n).to_string(), p.clone())).collect();
        self.substitute(&map)
    }

    /// Inverse of a single monomial with coefficient +-1.
    pub fn unit_inverse(&self) -> Option<Poly> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        if !(c.is_one() || (-c).is_one()) {
            return None;
        }
        let mut terms = BTreeMap::new();
        terms.insert(e.iter().map(|x| -x).collect(), c.clone());
        Some(Poly { vars: self.vars.clone(), terms })
    }

    /// Coefficient of the partial monomial `prod name^exp`, as a polynomial in
    /// the remaining symbols.
    pub fn coefficient(&self, partial: &[(&str, i32)]) -> Poly {
        let mut want: Vec<(Option<usize>, i32)> = Vec::new();
        for (n, e) in partial {
            want.push((self.var_index(n), *e));
        }
        if want.iter().any(|(k, e)| k.is_none() && *e != 0) {
            return Poly::zero();
        }
        let fixed: Vec<(usize, i32)> =
            want.iter().filter_map(|(k, e)| k.map(|k| (k, *e))).collect();
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if fixed.iter().all(|&(k, x)| e[k] == x) {
                let mut rest = e.clone();
                for &(k, _) in &fixed {
                    rest[k] = 0;
                }
                terms.insert(rest, c.clone());
            }
        }
        Self::canonical(self.vars.clone(), terms)
    }

    /// Coefficients with respect to one symbol: exponent -> coefficient.
    pub fn coefficients_in(&self, name: &str) -> BTreeMap<i32, Poly> {
        let mut out: BTreeMap<i32, BTreeMap<Exponents, BigInt>> = BTreeMap::new();
        match self.var_index(name) {
            None => {
                if !self.is_zero() {
                    out.insert(0, self.terms.clone());
                }
            }
            Some(k) => {
                for (e, c) in &self.terms {
                    let mut rest = e.clone();
                    let d = rest[k];
                    rest[k] = 0;
                    out.entry(d).or_default().insert(rest, c.clone());
                }
            }
        }
        out.into_iter().map(|(d, t)| (d, Self::canonical(self.vars.clone(), t))).collect()
    }

    /// Integer content: gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        use num_integer::Integer;
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Leading term in the lexicographic exponent order.
    pub fn leading(&self) -> Option<(&Exponents, &BigInt)> {
        self.terms.iter().next_back()
    }

    /// Componentwise minimal exponents over all terms.
    pub fn min_exponents(&self) -> Exponents {
        let mut m = vec![i32::MAX; self.vars.len()];
        for e in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).min(*b);
            }
        }
        if self.is_zero() {
            m.iter_mut().for_each(|x| *x = 0);
        }
        m
    }

    /// Componentwise maximal exponents over all terms.
    pub fn max_exponents(&self) -> Exponents {
        let mut m = vec![i32::MIN; self.vars.len()];
        for e in self.terms.keys() {
            for (a, b) in m.iter_mut().zip(e) {
                *a = (*a).max(*b);
            }
        }
        if self.is_zero() {
            m.iter_mut().for_each(|x| *x = 0);
        }
        m
    }

    /// Multiply every term by the monomial with exponent vector `by`
    /// (indexed by this polynomial's symbols).
    pub(crate) fn shift_exponents(&self, by: &[i32]) -> Poly {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(by).map(|(a, b)| a + b).collect(), c.clone()))
            .collect();
        Self::canonical(self.vars.clone(), terms)
    }

    /// Re-express over a larger symbol table (must contain all own symbols).
    pub(crate) fn embed(&self, vars: &Arc<[String]>) -> BTreeMap<Exponents, BigInt> {
        let map: Vec<usize> = self
            .vars
            .iter()
            .map(|v| vars.binary_search(v).expect("symbol missing from target table"))
            .collect();
        self.terms.iter().map(|(e, c)| (remap(e, &map, vars.len()), c.clone())).collect()
    }

    pub(crate) fn from_canonical_parts(
        vars: Arc<[String]>,
        terms: BTreeMap<Exponents, BigInt>,
    ) -> Poly {
        Self::canonical(vars, terms)
    }

    /// Sum of an iterator of polynomials.
    pub fn sum<'a, I: IntoIterator<Item = &'a Poly>>(items: I) -> Poly {
        let mut acc: Option<(Arc<[String]>, BTreeMap<Exponents, BigInt>)> = None;
        let mut slow = Poly::zero();
        for p in items {
            if p.is_zero() {
                continue;
            }
            match &mut acc {
                None => acc = Some((p.vars.clone(), p.terms.clone())),
                Some((v, t)) if *v == p.vars => {
                    for (e, c) in &p.terms {
                        *t.entry(e.clone()).or_insert_with(BigInt::zero) += c;
                    }
                }
                Some(_) => slow = slow.add(p),
            }
        }
        match acc {
            None => slow,
            Some((v, t)) => Self::canonical(v, t).add(&slow),
        }
    }
}

impl Default for Poly {
    fn default() -> Self {
        Poly::zero()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                Poly::$m(self, rhs)
            }
        }
    };
}
forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Poly::constant(c)
    }
}

/// Display order for symbols: q, t, z first, then indexed alphabets in
/// numeric order, then everything else by name.
fn display_key(name: &str) -> (u8, String, u64) {
    match name {
        "q" => return (0, String::new(), 0),
        "t" => return (1, String::new(), 0),
        "z" => return (2, String::new(), 0),
        _ => {}
    }
    let split = name.find(|c: char| c.is_ascii_digit()).unwrap_or(name.len());
    let (head, tail) = name.split_at(split);
    match tail.parse::<u64>() {
        Ok(n) if !head.is_empty() => (3, head.to_string(), n),
        _ => (4, name.to_string(), 0),
    }
}

impl Poly {
    /// Human-readable rendering, e.g. `1+2*q*t^3-x1`.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut order: Vec<usize> = (0..self.vars.len()).collect();
        order.sort_by_key(|&k| display_key(&self.vars[k]));
        let mut rows: Vec<(i32, Vec<i32>, &BigInt)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().sum(), order.iter().map(|&k| e[k]).collect(), c))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
        let mut out = String::new();
        for (idx, (_, e, c)) in rows.iter().enumerate() {
            let mut factors: Vec<String> = Vec::new();
            for (pos, &x) in e.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                let name = &self.vars[order[pos]];
                factors.push(if x == 1 { name.clone() } else { format!("{name}^{x}") });
            }
            let negative = c.is_negative();
            let mag = c.abs();
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", mag, factors.join("*"))
            };
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push(if negative { '-' } else { '+' });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.to_text())
    }
}

/// `1 - c * monomial`, the building block of every Pochhammer product.
pub fn one_minus(m: &Poly) -> Poly {
    Poly::one().sub(m)
}
