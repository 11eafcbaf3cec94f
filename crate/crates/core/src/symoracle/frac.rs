//! Fractions whose denominator is an integer times a product of binomials
//! (1 − q^a t^b). Sums take the least common multiple of factor multisets,
//! so no polynomial gcd is ever needed.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactalg::gcd::div_exact;
use crate::exactalg::{one_minus, Poly, RationalFunction};

/// Signed multiplicities of binomials (1 − q^a t^b).
pub type Factors = BTreeMap<(i32, i32), i32>;

pub fn binomial(a: i32, b: i32) -> Poly {
    one_minus(&Poly::monomial(BigInt::one(), &[("q", a), ("t", b)]))
}

pub fn factors_poly<'a>(f: impl IntoIterator<Item = (&'a (i32, i32), &'a u32)>) -> Poly {
    let mut out = Poly::one();
    for (&(a, b), &m) in f {
        out = out.mul(&binomial(a, b).pow(m));
    }
    out
}

/// `num / (int_den · Π (1 − q^a t^b)^m)`.
#[derive(Clone)]
pub struct Frac {
    num: Poly,
    int_den: BigInt,
    den: BTreeMap<(i32, i32), u32>,
}

impl Frac {
    pub fn zero() -> Self {
        Frac::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Frac::from_poly(Poly::one())
    }

    pub fn from_poly(p: Poly) -> Self {
        Frac { num: p, int_den: BigInt::one(), den: BTreeMap::new() }
    }

    /// Π (1 − q^a t^b)^m over a signed factor map.
    pub fn from_factors(f: &Factors) -> Self {
        let mut out = Frac::one();
        out.mul_factors(f);
        out
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn denominator(&self) -> Poly {
        factors_poly(&self.den).scale(&self.int_den)
    }

    /// Multiply by Π (1 − q^a t^b)^m, cancelling against the denominator
    /// where possible.
    pub fn mul_factors(&mut self, f: &Factors) {
        for (&k, &m) in f {
            if m > 0 {
                let have = self.den.get(&k).copied().unwrap_or(0);
                let cancel = have.min(m as u32);
                if cancel > 0 {
                    if have == cancel {
                        self.den.remove(&k);
                    } else {
                        self.den.insert(k, have - cancel);
                    }
                }
                let rest = m as u32 - cancel;
                if rest > 0 {
                    self.num = self.num.mul(&binomial(k.0, k.1).pow(rest));
                }
            } else if m < 0 {
                *self.den.entry(k).or_insert(0) += (-m) as u32;
            }
        }
    }

    pub fn div_int(&self, d: &BigInt) -> Frac {
        assert!(!d.is_zero(), "division by zero");
        let mut out = self.clone();
        if d.is_negative() {
            out.num = out.num.neg();
        }
        out.int_den *= d.abs();
        out.reduce_int();
        out
    }

    pub fn mul_poly(&self, p: &Poly) -> Frac {
        let mut out = self.clone();
        out.num = out.num.mul(p);
        out.reduce_int();
        out
    }

    fn reduce_int(&mut self) {
        if self.int_den.is_one() {
            return;
        }
        if self.num.is_zero() {
            self.int_den = BigInt::one();
            return;
        }
        let g = self.num.content().gcd(&self.int_den);
        if !g.is_one() {
            self.num = div_exact(&self.num, &Poly::from_bigint(g.clone())).expect("content divides");
            self.int_den /= g;
        }
    }

    pub fn mul(&self, o: &Frac) -> Frac {
        if self.is_zero() || o.is_zero() {
            return Frac::zero();
        }
        let mut out = Frac { num: self.num.mul(&o.num), int_den: &self.int_den * &o.int_den, den: self.den.clone() };
        for (k, m) in &o.den {
            *out.den.entry(*k).or_insert(0) += m;
        }
        out.reduce_int();
        out
    }

    pub fn add(&self, o: &Frac) -> Frac {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return o.clone();
        }
        let mut den = self.den.clone();
        for (k, m) in &o.den {
            let e = den.entry(*k).or_insert(0);
            *e = (*e).max(*m);
        }
        let lcm = self.int_den.lcm(&o.int_den);
        let lift = |f: &Frac| -> Poly {
            let extra = den.iter().map(|(k, m)| (k, m - f.den.get(k).copied().unwrap_or(0)));
            let extra: Vec<((i32, i32), u32)> = extra.map(|(k, m)| (*k, m)).collect();
            f.num.mul(&factors_poly(extra.iter().map(|(k, m)| (k, m)))).scale(&(&lcm / &f.int_den))
        };
        let mut out = Frac { num: lift(self).add(&lift(o)), int_den: lcm, den };
        out.reduce_int();
        out
    }

    pub fn neg(&self) -> Frac {
        let mut out = self.clone();
        out.num = out.num.neg();
        out
    }

    pub fn sub(&self, o: &Frac) -> Frac {
        self.add(&o.neg())
    }

    /// Exact quotient when the value is a polynomial.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.den.is_empty() && self.int_den.is_one() {
            return Some(self.num.clone());
        }
        div_exact(&self.num, &self.denominator())
    }

    pub fn to_ratfun(&self) -> RationalFunction {
        RationalFunction::new(self.num.clone(), self.denominator()).expect("nonzero denominator").normalize()
    }

    /// Equality of values by cross-multiplication.
    pub fn same_value(&self, o: &Frac) -> bool {
        self.sub(o).is_zero()
    }

    /// Apply `f` to the numerator; `f` must leave q and t alone.
    pub fn map_num(&self, f: impl FnOnce(&Poly) -> Poly) -> Frac {
        let mut out = self.clone();
        out.num = f(&self.num);
        out.reduce_int();
        out
    }

    /// Substitute into the numerator symbols other than q and t.
    pub fn subs(&self, bindings: &[(&str, Poly)]) -> Frac {
        assert!(bindings.iter().all(|(v, _)| *v != "q" && *v != "t"), "q and t live in the denominator");
        self.map_num(|p| p.subs(bindings).expect("polynomial substitution"))
    }

    /// Exchange q and t throughout.
    pub fn swap_qt(&self) -> Frac {
        Frac {
            num: crate::qseries::swap_symbols(&self.num, "q", "t"),
            int_den: self.int_den.clone(),
            den: self.den.iter().map(|(&(a, b), &m)| ((b, a), m)).collect(),
        }
    }
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({}", self.num, self.int_den)?;
        for ((a, b), m) in &self.den {
            write!(f, " (1-q^{a}t^{b})^{m}")?;
        }
        write!(f, ")")
    }
}

/// Drop every term whose total degree in `vars` exceeds `deg`.
pub fn truncate(p: &Poly, vars: &[String], deg: i32) -> Poly {
    let idx: Vec<usize> = p.vars().iter().enumerate().filter(|(_, v)| vars.contains(v)).map(|(k, _)| k).collect();
    let kept = p
        .terms()
        .iter()
        .filter(|(e, _)| idx.iter().map(|&k| e[k]).sum::<i32>() <= deg)
        .map(|(e, c)| (e.clone(), c.clone()));
    Poly::from_terms(p.vars(), kept)
}
